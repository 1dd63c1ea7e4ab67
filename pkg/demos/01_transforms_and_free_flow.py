"""Transform conventions and the exactly-dispersive free flow.

The lattice module fixes the symmetric 1/sqrt(2*pi) Fourier pair on the
circle [0, 2*pi*lam) with the normalized counting measure, and the symbols
module applies the unimodular free-flow multiplier exp(i t P(k)) with
P(k) = (-1)^(j+1) k^(2j+1).
"""

import numpy as np

from dcl import (
    ModelParams,
    dispersion_symbol,
    forward_transform,
    free_evolution,
    hs_norm,
    inverse_transform,
    x_grid,
)

params = ModelParams(j=2, kmax=32.0)
nx = params.default_grid()
x = x_grid(params, nx)

print("== transform of cos x ==")
spec = forward_transform(np.cos(x), params)
print(f"amp(+1) = {spec.amp(1):.12f}   (sqrt(pi/2) = {np.sqrt(np.pi / 2):.12f})")

print("\n== round trip ==")
err = np.abs(inverse_transform(spec, nx) - np.cos(x)).max()
print(f"max |inverse(forward(cos)) - cos| = {err:.2e}")

print("\n== dispersion relation ==")
for j in (1, 2, 3):
    print(f"j={j}: P(2) = {dispersion_symbol(2, j)}")

print("\n== free flow is a translation for a single mode (j=2, k=1: P = -1) ==")
moved = free_evolution(spec, t=0.8)
shifted = forward_transform(np.cos(x - 0.8), params)
print(f"max |S(0.8) cos - cos(x - 0.8)^| = {np.abs(moved.amps - shifted.amps).max():.2e}")

print("\n== every Sobolev norm is invariant under the flow ==")
rng = np.random.default_rng(1)
for s in (-0.5, 0.0, 1.5):
    t = rng.uniform(-5, 5)
    drift = abs(hs_norm(free_evolution(spec, t), s) - hs_norm(spec, s))
    print(f"s={s:+.1f}, t={t:+.2f}: |drift| = {drift:.2e}")
