"""Fourier multipliers of the model: dispersion, free flow, smoothing, nonlinearity.

The linear part is u_t + d_x^(2j+1) u = 0, whose symbol-side solution
operator is the unimodular multiplier exp(i t P(k)) with

    P(k) = (-1)^(j+1) k^(2j+1).

The nonlinearity enters through the symmetric bilinear map

    F(u, v) = 1/2 d_x(u v) + d_x (1 - mu^2 d_x^2)^(-1) [u v + mu^2/2 u_x v_x]

(mu = 1 is the unscaled model; the mu-dressed form appears after dilating
the circle).  F(u, u) is the full nonlinearity moved to the right-hand
side: u_t + d_x^(2j+1) u + F(u, u) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .lattice import (
    TWO_PI_SQRT,
    ModelParams,
    SpatialSpectrum,
    convolve,
    forward_transform,
    inverse_transform,
)


def dispersion_symbol(k, j: int):
    """P(k) = (-1)^(j+1) k^(2j+1), exact integer arithmetic for integer k."""
    if j < 1:
        raise ValueError("j must be >= 1")
    sign = 1 if j % 2 == 1 else -1
    if isinstance(k, (int, np.integer)):
        return sign * int(k) ** (2 * j + 1)  # Python ints never overflow
    return sign * np.asarray(k, dtype=float) ** (2 * j + 1)


def nonlocal_multiplier(k):
    """Symbol i*k/(1+k^2) of d_x (1 - d_x^2)^(-1); peaks at |k|=1 with modulus 1/2."""
    k = np.asarray(k, dtype=float)
    return 1j * k / (1.0 + k * k)


@dataclass(frozen=True)
class MultiplierSet:
    """Cached lattice arrays for every multiplier the model needs."""

    params: ModelParams

    @cached_property
    def k(self) -> np.ndarray:
        return self.params.k_values()

    @cached_property
    def dispersion(self) -> np.ndarray:
        return dispersion_symbol(self.k, self.params.j)

    @cached_property
    def derivative(self) -> np.ndarray:
        return 1j * self.k

    @cached_property
    def nonlocal_smoothing(self) -> np.ndarray:
        out = nonlocal_multiplier(self.k)
        out[self.params.nmax] = 0.0  # k=0 excluded
        return out

    def helmholtz(self, mu: float = 1.0) -> np.ndarray:
        """(1 - mu^2 d_x^2)^(-1) on the lattice: 1/(1 + mu^2 k^2)."""
        return 1.0 / (1.0 + (mu * self.k) ** 2)

    def semigroup(self, t: float) -> np.ndarray:
        """Free-flow phases exp(i t P(k))."""
        return np.exp(1j * t * self.dispersion)


def free_evolution(spec: SpatialSpectrum, t: float) -> SpatialSpectrum:
    """Apply the free group S(t): amps(k) -> exp(i t P(k)) amps(k).

    Unimodular, so every H^s norm is invariant.
    """
    phases = MultiplierSet(spec.params).semigroup(t)
    return spec.with_amps(phases * spec.amps)


def derivative(spec: SpatialSpectrum, order: int = 1) -> SpatialSpectrum:
    mult = (1j * spec.params.k_values()) ** order
    return spec.with_amps(mult * spec.amps)


def product_spectrum(u1: SpatialSpectrum, u2: SpatialSpectrum,
                     dealias: bool | None = None) -> SpatialSpectrum:
    """Spectrum of the pointwise product u1*u2, truncated at kmax.

    dealias=True (default from params) runs the 2/3-rule route: zero-pad to
    a grid that represents the quadratic product exactly, multiply in
    physical space, transform back.  dealias=False evaluates the normalized
    lattice convolution instead (times the 1/sqrt(2*pi) the symmetric
    transform convention puts in front of a product).  Both are exact for
    band-limited inputs and are cross-checked in the tests.
    """
    p = u1.params
    if dealias is None:
        dealias = p.dealias
    if not dealias:
        out = convolve(u1, u2)
        return out.with_amps(out.amps / TWO_PI_SQRT,
                             truncation_loss=out.truncation_loss / TWO_PI_SQRT,
                             zero_mode=out.zero_mode / TWO_PI_SQRT)
    m = p.nmax
    nx = p.default_grid(pad=2)  # resolves |k| <= 2*kmax: alias-free quadratic products
    f1 = inverse_transform(u1, nx)
    f2 = f1 if u2 is u1 else inverse_transform(u2, nx)
    fhat = np.fft.fft(f1 * f2) * (TWO_PI_SQRT * p.lam / nx)
    amps = np.zeros(2 * m + 1, dtype=complex)
    amps[m + 1:] = fhat[1:m + 1]
    amps[:m] = fhat[nx - m:]
    tail = fhat[m + 1:nx - m]  # dropped: beyond kmax (by design for quadratics)
    loss = math.sqrt(float(np.sum(np.abs(tail) ** 2)) / p.lam)
    return SpatialSpectrum(p, amps, truncation_loss=loss, zero_mode=complex(fhat[0]))


def nonlinearity_F(u1: SpatialSpectrum, u2: SpatialSpectrum, mu: float = 1.0,
                   kdv: bool = False, dealias: bool | None = None) -> SpatialSpectrum:
    """The symmetric bilinear nonlinearity; F(u,u) is the model's full nonlinear term.

    kdv=True keeps only 1/2 d_x(u1 u2), the local-dispersion comparison mode.
    Every term carries a d_x, so the output is mean-zero by construction and
    real input yields real output.
    """
    p = u1.params
    u1._check_compatible(u2)
    mults = MultiplierSet(p)
    prod = product_spectrum(u1, u2, dealias=dealias)
    amps = 0.5 * mults.derivative * prod.amps
    loss = prod.truncation_loss
    if not kdv:
        dprod = product_spectrum(derivative(u1), derivative(u2), dealias=dealias)
        smooth = mults.derivative * mults.helmholtz(mu)
        amps = amps + smooth * (prod.amps + 0.5 * mu * mu * dprod.amps)
        loss = max(loss, dprod.truncation_loss)
    return SpatialSpectrum(p, amps, truncation_loss=loss)


def local_form_rhs(u: SpatialSpectrum, dealias: bool | None = None) -> SpatialSpectrum:
    """Time derivative of m = u - u_xx from the equivalent local form.

    Applying (1 - d_x^2) to the model turns it into
        m_t + d_x^(2j+1) m + u m_x + 2 u_x m = 0,
    so m_t = -d_x^(2j+1) m - u m_x - 2 u_x m.  Used purely as an
    independent cross-check of nonlinearity_F.
    """
    p = u.params
    mults = MultiplierSet(p)
    k = mults.k
    m_spec = u.with_amps((1.0 + k * k) * u.amps)
    mx_spec = derivative(m_spec)
    ux_spec = derivative(u)
    adv = product_spectrum(u, mx_spec, dealias=dealias)
    stretch = product_spectrum(ux_spec, m_spec, dealias=dealias)
    lin = dispersion_symbol(k, p.j) * 1j * m_spec.amps  # d_x^(2j+1) m has symbol -i P(k)
    return SpatialSpectrum(p, lin - adv.amps - 2.0 * stretch.amps)
