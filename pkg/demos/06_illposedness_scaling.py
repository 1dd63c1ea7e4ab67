"""The two-mode family that overwhelms the bilinear estimate at low regularity.

Unit slabs at k = +-N and +-(N-1) have composite-norm size ~ N^s, while
their modulation-weighted bilinear response comes out at ~ N^(2-j): for
s < 1 - j/2 the response outgrows the product of the inputs and no
contraction constant can exist.  The scan fits both log-log slopes and
calls the verdict.
"""

from dcl import CounterexampleConfig, collision_scan

for j, s_list in ((2, (-0.25, 0.25)), (3, (-1.0, -0.2))):
    for s in s_list:
        rep = collision_scan(CounterexampleConfig(j=j, s=s))
        print(f"j={j} s={s:+.2f}: response slope {rep.slope_L:+.3f}, "
              f"input-product slope {rep.slope_R:+.3f} -> {rep.verdict}")

print("\nfull table for j=2, s=-0.25:")
rep = collision_scan(CounterexampleConfig(j=2, s=-0.25))
print("N,L,R")
for row in rep.rows:
    print(f"{row['N']:>5},{row['L']:.6e},{row['R']:.6e}")
print(f"critical index for j=2 is {rep.critical_s}; "
      "the verdict band +-0.05 around it reports INCONCLUSIVE")
