"""Fully-online rounding with no prior information.

The first point initializes a degenerate (rank-0) state; each point that
leaves the current affine span triggers an irregular step that raises the
rank by one and adds exactly 1 to the approximation factor, while in-span
points that escape the outer body trigger regular updates.
"""

import numpy as np

from ellipstream import membership, run_fully_online

rng = np.random.default_rng(1)
d = 5
pts = rng.standard_normal((400, d)) * np.array([8.0, 4.0, 2.0, 1.0, 0.5])

state, report = run_fully_online(pts)

print(f"{len(pts)} points in d={d}")
print(f"irregular steps: {report.irregular_count()} (one per rank increase)")
print(f"sum of regular-step gammas: {report.regular_gamma_sum():.3f}")

# ledger identity: 1/alpha = 1 + #irregular + 2 * sum(gamma)
expected = 1.0 + report.irregular_count() + 2.0 * report.regular_gamma_sum()
print(f"final 1/alpha = {state.alpha_inv:.6f}, ledger says {expected:.6f}")

worst = max(float(membership(state.ellipsoid, p)) for p in pts)
print(f"worst outer membership margin: {worst:.2e}")
print(f"outer semiaxes: {np.array2string(state.ellipsoid.semiaxes, precision=3)}")
