"""Fixed-point iteration, contraction ratios, and the dilation symmetry.

The integral (Duhamel) form of the model is iterated from the windowed
free flow; for small data the iterates contract geometrically and the
terminal iterate agrees with the time stepper.  Independently, dilating a
computed solution must solve the mu-dressed equation, which the residual
confirms to solver accuracy.
"""

import numpy as np

from dcl import ModelParams, PicardConfig, forward_transform, hs_norm, picard_iterate, simulate, x_grid
from dcl.rescale import hs_scaling_exponent, rescale_trajectory, rescaled_residual

params = ModelParams(j=2, kmax=16.0)
x = x_grid(params, params.default_grid())
u0 = forward_transform(0.3 * (np.cos(x) + 0.6 * np.cos(2 * x) + 0.3 * np.sin(3 * x)), params)

print("== fixed-point iteration ==")
res = picard_iterate(u0, PicardConfig(iterations=8, nt=4097, report_s=-0.25))
print("per-step contraction ratios (slice norms):")
print("  " + ", ".join(f"{r:.4f}" for r in res.ratios_hs))
print("per-step contraction ratios (composite space-time norm):")
print("  " + ", ".join(f"{r:.4f}" for r in res.ratios_zs))
print(f"diverged: {res.diverged}")

traj = simulate(u0, T=0.5, dt=5e-4, stride=10**9)
gap = hs_norm(res.state_at(0.5) - traj.states[-1].spec, -0.25)
print(f"terminal iterate vs stepper at t=0.5: {gap:.2e}")

print("\n== dilation symmetry ==")
from dcl import pde_residual

run = simulate(0.25 * u0, T=0.05, dt=1.25e-4, stride=1)
for mu in (2.0, 4.0):
    scaled = rescale_trajectory(run, mu)
    detail = pde_residual(scaled, mu=mu)
    print(f"mu={mu}: residual of the mu-dressed equation = {detail['max_residual']:.2e} "
          f"(differencing floor {detail['differencing_error']:.1e}) "
          f"on the circle of size {scaled.params.lam}")

print("\nmeasured dilation exponent of the initial-data norm:")
for s in (0.0, -0.5, -1.0):
    print(f"  s={s:+.1f}: ||u0^mu||_Hs ~ mu^{hs_scaling_exponent(u0, s):+.3f}")
