"""Streaming convex-hull coreset selection.

A point is kept when committing it would either raise the affine span
dimension or multiply the outer volume by at least e; everything else is
provably redundant and the driver state is left untouched, which is what
makes replaying the selected sub-stream bit-exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, List, Optional, Tuple

import numpy as np

from .ellipsoid import Ellipsoid, log_volume
from .state import RoundingState
from .streaming import RunReport, StepRecord
from .update_rule import SPAN_TOL, full_update_detailed, irregular_update, is_off_span

# selection threshold in log space; ties select the point
VOLUME_JUMP_LOG = 1.0
TIE_TOL = 1e-12


@dataclass(frozen=True)
class CoresetTrace:
    selected: Tuple[int, ...] = ()
    reasons: Tuple[str, ...] = ()  # dim_growth | volume_jump
    driver: Optional[RoundingState] = None

    def with_selection(self, t: int, reason: str,
                       state: RoundingState) -> "CoresetTrace":
        return CoresetTrace(self.selected + (t,), self.reasons + (reason,), state)


def coreset_step(trace: CoresetTrace, t: int,
                 z: np.ndarray) -> Tuple[CoresetTrace, bool]:
    """Process one stream point; returns the new trace and whether it was kept."""
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise ValueError(f"non-finite point at index {t}")
    state = trace.driver
    if state is None:
        first = RoundingState(Ellipsoid.point(z), alpha=1.0)
        return trace.with_selection(t, "dim_growth", first), True

    if state.dim == 0:
        if float(np.linalg.norm(z - state.center)) <= SPAN_TOL:
            return trace, False
        return trace.with_selection(t, "dim_growth", irregular_update(state, z)), True

    if is_off_span(state, z):
        return trace.with_selection(t, "dim_growth", irregular_update(state, z)), True

    tentative, params = full_update_detailed(state, z)
    if params is None:
        return trace, False
    dlogvol = log_volume(tentative.ellipsoid) - log_volume(state.ellipsoid)
    if dlogvol >= VOLUME_JUMP_LOG - TIE_TOL:
        return trace.with_selection(t, "volume_jump", tentative), True
    return trace, False


def run_coreset(stream: Iterable[np.ndarray]) -> Tuple[CoresetTrace, RunReport]:
    """Fold coreset_step over a stream."""
    trace = CoresetTrace()
    report = RunReport()
    for t, z in enumerate(stream, start=1):
        trace, selected = coreset_step(trace, t, z)
        state = trace.driver
        if state is None:
            continue
        if selected:
            kind = "irregular" if trace.reasons[-1] == "dim_growth" else "regular"
            if len(trace.selected) == 1:
                kind = "init"
        else:
            kind = "skip"
        report.append(StepRecord(t, state.alpha, log_volume(state.ellipsoid),
                                 kind, 0.0))
    if trace.driver is not None:
        report.final_alpha_inv = trace.driver.alpha_inv
    return trace, report
