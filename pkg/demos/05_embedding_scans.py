"""Pointwise weight-dominance scans behind the norm-embedding chain.

Inside the admissible regularity window the composite norm's per-region
weights dominate the uniform ones up to a constant: the scanned ratio
maxima stay put as the frequency box doubles.  Outside the window the
dominance genuinely fails and the scan exhibits the divergence.
"""

from dcl import ModelParams, verify_embeddings
from dcl.bourgain import admissible_window

params = ModelParams(j=2, kmax=4.0)
lo, hi = admissible_window(params)
print(f"admissible window for j=2: [{lo:.4f}, {hi:.4f}]")


def show(rep):
    print(f"s = {rep['s']}: overall {'PASS' if rep['pass'] else 'FAIL'}")
    for e in rep["entries"]:
        trend = " -> ".join(f"{t:.4g}" for t in e["trend"])
        mark = "ok  " if e["pass"] else "FAIL"
        print(f"  [{mark}] {e['region']:4s} {e['inequality']:5s} max ratio: {trend}")


print("\n== inside the window ==")
show(verify_embeddings(-0.25, params, kbound=256.0, doublings=1))

print("\n== outside the window (scan forced) ==")
show(verify_embeddings(-2.0, params, kbound=256.0, doublings=1,
                       allow_outside_window=True))
