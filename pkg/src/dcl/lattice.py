"""Frequency lattice, Fourier conventions, and basic spectral arithmetic.

Everything downstream works on the circle T = [0, 2*pi*lam) with the
frequency lattice Z_lam = {n/lam : n integer, n != 0} truncated at kmax.
The transform pair is the symmetric 1/sqrt(2*pi) convention

    F f(k) = (2*pi)^(-1/2) * integral_0^{2*pi*lam} exp(-i k x) f(x) dx
    f(x)   = (2*pi)^(-1/2) * (1/lam) * sum_k exp(i k x) F f(k)

and sums over the lattice always carry the normalized counting measure
(1/lam) * sum.  The zero mode is excluded from every spectrum; the field
mean is reported (and, in the solver, carried) as a separate scalar.

The raw FFT convention differs from the above by a fixed scaling, which is
confined to `forward_transform` / `inverse_transform`; nothing else in the
package touches an FFT normalization.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.fft import next_fast_len

TWO_PI_SQRT = math.sqrt(2.0 * math.pi)


def bracket(x):
    """Japanese bracket <x> = (1 + x^2)^(1/2); <0> = 1."""
    return np.sqrt(1.0 + np.asarray(x, dtype=float) ** 2)


@dataclass(frozen=True)
class ModelParams:
    """Fixed model configuration: dispersion order, circle size, truncation.

    j       dispersion order (>= 2 for the full norm machinery; j = 1 is
            accepted so the lower-order comparison mode can run)
    lam     period scale, domain [0, 2*pi*lam), lam >= 1
    epsilon sharpness margin for the admissible regularity window,
            0 < epsilon < 1/(100 j^5); defaults to half that ceiling
    kmax    frequency truncation K; kmax*lam must be a positive integer
    dealias apply the 2/3-rule padded product route (spectral convolution
            is used when False)
    """

    j: int
    lam: float = 1.0
    epsilon: float | None = None
    kmax: float | None = None
    dealias: bool = True

    def __post_init__(self):
        if int(self.j) != self.j or self.j < 1:
            raise ValueError(f"j must be a positive integer, got {self.j}")
        object.__setattr__(self, "j", int(self.j))
        if self.lam < 1.0:
            raise ValueError(f"lam must be >= 1, got {self.lam}")
        eps_cap = 1.0 / (100.0 * self.j**5)
        if self.epsilon is None:
            object.__setattr__(self, "epsilon", eps_cap / 2.0)
        elif not 0.0 < self.epsilon < eps_cap:
            raise ValueError(
                f"epsilon must lie in (0, {eps_cap:.3g}) for j={self.j}, got {self.epsilon}"
            )
        if self.kmax is None:
            object.__setattr__(self, "kmax", 256.0 / self.lam)
        m = self.kmax * self.lam
        if abs(m - round(m)) > 1e-9 or round(m) < 1:
            raise ValueError(f"kmax*lam must be a positive integer, got {m}")

    @property
    def nmax(self) -> int:
        """Integer index bound: lattice points are k = n/lam, 0 < |n| <= nmax."""
        return int(round(self.kmax * self.lam))

    def k_of(self, n):
        return np.asarray(n) / self.lam

    def k_values(self) -> np.ndarray:
        """All lattice frequencies, n = -nmax..nmax (index n+nmax); k=0 slot present but excluded."""
        return np.arange(-self.nmax, self.nmax + 1) / self.lam

    def period(self) -> float:
        return 2.0 * math.pi * self.lam

    def default_grid(self, pad: int = 1) -> int:
        """FFT-friendly sample count resolving modes up to pad*kmax without aliasing."""
        return next_fast_len(2 * pad * self.nmax + 2)


@dataclass(frozen=True)
class SpatialSpectrum:
    """Complex amplitudes on the truncated lattice; the PDE state in Fourier space.

    amps is a dense array over n = -nmax..nmax (offset by nmax); the n=0
    slot is structurally zero.  Instances are treated as immutable values:
    all operations return new spectra.

    truncation_loss / zero_mode are bookkeeping from operations that had to
    drop content (convolution tails beyond kmax, product means).
    """

    params: ModelParams
    amps: np.ndarray
    truncation_loss: float = field(default=0.0, compare=False)
    zero_mode: complex = field(default=0j, compare=False)

    def __post_init__(self):
        n = 2 * self.params.nmax + 1
        a = np.asarray(self.amps, dtype=complex)
        if a.shape != (n,):
            raise ValueError(f"amps must have shape ({n},), got {a.shape}")
        if a[self.params.nmax] != 0:
            a = a.copy()
            a[self.params.nmax] = 0.0
        object.__setattr__(self, "amps", a)

    @classmethod
    def zeros(cls, params: ModelParams) -> "SpatialSpectrum":
        return cls(params, np.zeros(2 * params.nmax + 1, dtype=complex))

    @classmethod
    def from_modes(cls, params: ModelParams, modes: dict) -> "SpatialSpectrum":
        """Build from {k: amplitude}; k must sit on the lattice."""
        a = np.zeros(2 * params.nmax + 1, dtype=complex)
        for k, v in modes.items():
            n = k * params.lam
            if abs(n - round(n)) > 1e-9:
                raise ValueError(f"k={k} is not on the lattice (lam={params.lam})")
            n = int(round(n))
            if n == 0:
                raise ValueError("zero mode is excluded from spectra")
            if abs(n) > params.nmax:
                raise ValueError(f"k={k} beyond truncation kmax={params.kmax}")
            a[n + params.nmax] = v
        return cls(params, a)

    def amp(self, k) -> complex:
        n = int(round(k * self.params.lam))
        return self.amps[n + self.params.nmax]

    def k_values(self) -> np.ndarray:
        return self.params.k_values()

    def with_amps(self, amps, **meta) -> "SpatialSpectrum":
        return SpatialSpectrum(self.params, amps, **meta)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        """amps(-k) == conj(amps(k)), the signature of a real underlying field."""
        a = self.amps
        scale = max(np.abs(a).max(), 1.0)
        return bool(np.abs(a[::-1] - np.conj(a)).max() <= tol * scale)

    def __add__(self, other):
        self._check_compatible(other)
        return SpatialSpectrum(self.params, self.amps + other.amps)

    def __sub__(self, other):
        self._check_compatible(other)
        return SpatialSpectrum(self.params, self.amps - other.amps)

    def __mul__(self, c):
        return SpatialSpectrum(self.params, self.amps * c)

    __rmul__ = __mul__

    def _check_compatible(self, other):
        if self.params.lam != other.params.lam or self.params.nmax != other.params.nmax:
            raise ValueError("spectra live on different lattices")


@dataclass(frozen=True)
class NormSpec:
    """Selects one of the five norms: kind in {Hs, Xsb, Ys, Zs, Ws}."""

    kind: str
    s: float
    b: float | None = None

    def __post_init__(self):
        if self.kind not in ("Hs", "Xsb", "Ys", "Zs", "Ws"):
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.kind == "Xsb" and (self.b is None or not math.isfinite(self.b)):
            raise ValueError("Xsb requires a finite b")


def x_grid(params: ModelParams, nx: int) -> np.ndarray:
    return np.arange(nx) * (params.period() / nx)


def forward_transform(samples, params: ModelParams, x=None, return_mean: bool = False):
    """Transform uniform samples on [0, 2*pi*lam) to a truncated spectrum.

    The trapezoid rule is exact for band-limited periodic data, so this is
    the continuum-convention transform up to machine precision whenever the
    sample count resolves the content (>= 2*kmax*lam + 1 points).

    The zero mode (field mean) is dropped from the spectrum; pass
    return_mean=True to receive (spectrum, mean).  A warning diagnostic is
    emitted if the input carries energy above kmax, or an unreported mean.
    """
    f = np.asarray(samples)
    nx = f.shape[-1]
    m = params.nmax
    if nx < 2 * m + 1:
        raise ValueError(f"need at least {2 * m + 1} samples to resolve kmax, got {nx}")
    if x is not None:
        x = np.asarray(x, dtype=float)
        dx = np.diff(x)
        if x.shape != (nx,) or not np.allclose(dx, dx[0], rtol=1e-9, atol=1e-12):
            raise ValueError("sample grid is not uniform")
        if abs(x[0]) > 1e-12 or abs((x[-1] + dx[0]) - params.period()) > 1e-9 * params.period():
            raise ValueError("sample grid does not tile [0, 2*pi*lam)")
    fhat = np.fft.fft(f)
    scale = TWO_PI_SQRT * params.lam / nx
    amps = np.zeros(2 * m + 1, dtype=complex)
    amps[m + 1:] = scale * fhat[1:m + 1]
    amps[:m] = scale * fhat[nx - m:]
    mean = fhat[0] / nx
    if np.isrealobj(f):
        mean = mean.real
    half = nx // 2
    if half > m:
        tail = np.abs(fhat[m + 1:nx - m]) * scale
        total = max(np.abs(amps).max(), abs(mean), 1e-300)
        if tail.size and tail.max() > 1e-10 * total:
            warnings.warn(
                f"input carries energy above kmax={params.kmax} (max aliased amp "
                f"{tail.max():.3g}); spectrum is truncated",
                stacklevel=2,
            )
    spec = SpatialSpectrum(params, amps)
    if return_mean:
        return spec, mean
    if abs(mean) > 1e-10 * max(np.abs(amps).max(), 1.0):
        warnings.warn(
            f"dropping nonzero field mean {mean:.3g}; pass return_mean=True to keep it",
            stacklevel=2,
        )
    return spec


def inverse_transform(spec: SpatialSpectrum, nx: int | None = None, mean=0.0) -> np.ndarray:
    """Samples of the field on the uniform grid; real iff the spectrum is Hermitian."""
    p = spec.params
    m = p.nmax
    if nx is None:
        nx = p.default_grid()
    if nx < 2 * m + 1:
        raise ValueError(f"nx={nx} cannot carry modes up to kmax; need >= {2 * m + 1}")
    fhat = np.zeros(nx, dtype=complex)
    fhat[1:m + 1] = spec.amps[m + 1:]
    fhat[nx - m:] = spec.amps[:m]
    f = np.fft.ifft(fhat) * (nx / (TWO_PI_SQRT * p.lam)) + mean
    if spec.is_hermitian() and np.isrealobj(np.asarray(mean)):
        return f.real
    return f


def convolve(a: SpatialSpectrum, b: SpatialSpectrum) -> SpatialSpectrum:
    """Normalized lattice convolution (1/lam) * sum_{k1} a(k-k1) b(k1).

    The output is truncated at kmax; dropped tail mass (L2 with the counting
    measure) is recorded on the result as truncation_loss, and the k=0 value
    as zero_mode.  Note the transform of a pointwise product is
    (2*pi)^(-1/2) times this convolution under the symmetric convention.
    """
    a._check_compatible(b)
    p = a.params
    m = p.nmax
    full = np.convolve(a.amps, b.amps) / p.lam  # indices n = -2m .. 2m
    center = full[m:3 * m + 1]
    zero = complex(full[2 * m])
    center = center.copy()
    tail = np.concatenate([full[:m], full[3 * m + 1:]])
    loss = math.sqrt(float(np.sum(np.abs(tail) ** 2)) / p.lam)
    return SpatialSpectrum(p, center, truncation_loss=loss, zero_mode=zero)


def hs_norm(spec: SpatialSpectrum, s: float) -> float:
    """Sobolev norm ((1/lam) * sum <k>^(2s) |amps|^2)^(1/2)."""
    k = spec.k_values()
    w = bracket(k) ** (2.0 * s)
    return math.sqrt(float(np.sum(w * np.abs(spec.amps) ** 2)) / spec.params.lam)


def norm_value(spec, ns: NormSpec) -> float:
    """Evaluate a NormSpec against a spatial spectrum (Hs only; the
    space-time kinds live in dcl.bourgain and dispatch from there)."""
    if ns.kind != "Hs":
        raise ValueError(f"{ns.kind} acts on space-time spectra, not spatial ones")
    return hs_norm(spec, ns.s)


# -- serialization ------------------------------------------------------------

def spectrum_to_json(spec: SpatialSpectrum) -> str:
    modes = []
    m = spec.params.nmax
    for i, v in enumerate(spec.amps):
        if v != 0:
            modes.append({"k": (i - m) / spec.params.lam, "re": float(v.real), "im": float(v.imag)})
    doc = {"lambda": spec.params.lam, "j": spec.params.j, "modes": modes}
    return json.dumps(doc, sort_keys=True)


def spectrum_from_json(text: str, kmax: float | None = None, **kwargs) -> SpatialSpectrum:
    doc = json.loads(text)
    lam = doc["lambda"]
    ks = [mode["k"] for mode in doc["modes"]]
    if kmax is None:
        top = max((abs(k) for k in ks), default=1.0 / lam)
        kmax = max(256.0 / lam, math.ceil(top * lam) / lam)
    params = ModelParams(j=doc["j"], lam=lam, kmax=kmax, **kwargs)
    return SpatialSpectrum.from_modes(
        params, {mode["k"]: mode["re"] + 1j * mode["im"] for mode in doc["modes"]}
    )


def field_to_csv(x: np.ndarray, samples: np.ndarray) -> str:
    rows = ["x,re,im"]
    samples = np.asarray(samples, dtype=complex)
    for xi, fi in zip(x, samples):
        rows.append(f"{xi!r},{fi.real!r},{fi.imag!r}")
    return "\n".join(rows) + "\n"
