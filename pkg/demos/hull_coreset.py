"""Streaming hull coreset.

Keep a point only when it raises the span dimension or multiplies the
outer volume by at least e. The kept sub-stream replays to the exact same
final ellipsoid, and every discarded point stays within a constant-factor
blow-up of the outer body.
"""

import math

import numpy as np

from ellipstream import membership, run_coreset

rng = np.random.default_rng(2)
d = 3
pts = rng.standard_normal((1000, d)) * 5.0

trace, report = run_coreset(pts)
state = trace.driver

print(f"{len(pts)} streamed points -> coreset of {len(trace.selected)}")
print("kept indices:", list(trace.selected))
print("reasons:     ", list(trace.reasons))

replay, _ = run_coreset(pts[[i - 1 for i in trace.selected]])
same = np.array_equal(state.ellipsoid.semiaxes, replay.driver.ellipsoid.semiaxes)
print(f"replay on the coreset reproduces the ellipsoid bit-exactly: {same}")

factor = 2.0 * math.e + 1.0
blown = state.ellipsoid.scaled(factor)
sel = set(trace.selected)
worst = max(float(membership(blown, pts[t - 1]))
            for t in range(1, len(pts) + 1) if t not in sel)
print(f"worst discarded-point margin against the (2e+1)-scaled outer body: {worst:.2e}")
