"""End-to-end drivers: seeded two-phase rounding and fully-online rounding.

Both consume a finite iterable of points and fold the monotone update rule
over it, producing the final sandwich state plus a per-step report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .ellipsoid import Ellipsoid, log_volume
from .state import Phase, RoundingState
from .update_rule import (
    SPAN_TOL,
    UpdateError,
    full_update_detailed,
    irregular_update,
    is_off_span,
)

# re-exported: the state type logically belongs to this module
__all__ = [
    "RoundingState",
    "StepRecord",
    "RunReport",
    "run_seeded",
    "run_fully_online",
]

StepObserver = Callable[[int, RoundingState, RoundingState, np.ndarray, str, float], None]


@dataclass(frozen=True)
class StepRecord:
    t: int
    alpha: float
    log_volume: float
    step_kind: str  # init | skip | regular | irregular | local
    gamma: float


@dataclass
class RunReport:
    records: List[StepRecord] = field(default_factory=list)
    final_alpha_inv: float = 1.0
    aspect_surrogate: float = 1.0

    def append(self, rec: StepRecord) -> None:
        if self.records and rec.t <= self.records[-1].t:
            raise ValueError("records must be strictly ordered by t")
        self.records.append(rec)

    def regular_gamma_sum(self) -> float:
        return sum(r.gamma for r in self.records if r.step_kind == "regular")

    def irregular_count(self) -> int:
        return sum(1 for r in self.records if r.step_kind == "irregular")


def _check_point(z: np.ndarray, t: int) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise ValueError(f"non-finite point at index {t}")
    return z


def _observe_aspect(report: RunReport, state: RoundingState) -> None:
    body = state.ellipsoid
    if body.rank:
        ratio = float(body.semiaxes.max() / (state.alpha * body.semiaxes.min()))
        report.aspect_surrogate = max(report.aspect_surrogate, ratio)


def run_seeded(
    stream: Iterable[np.ndarray],
    c0: np.ndarray,
    r0: float,
    on_step: Optional[StepObserver] = None,
    use_rank_one: bool = False,
) -> Tuple[RoundingState, RunReport]:
    """Two-phase rounding given a seed ball c0 + r0*B inside the hull.

    Phase I keeps both bodies as balls around c0; once a point lands
    beyond r0 * d * log(d) the outer ball is grown to that radius once
    and for all and every remaining point (including the trigger) goes
    through the regular update.
    """
    c0 = np.atleast_1d(np.asarray(c0, dtype=float))
    d = c0.shape[0]
    if d < 2:
        raise ValueError("seeded mode needs dimension >= 2")
    if not (r0 > 0):
        raise ValueError("seed radius must be positive")
    gate = r0 * d * math.log(d)

    report = RunReport()
    state = RoundingState(Ellipsoid.ball(c0, r0), alpha=1.0,
                          phase=Phase.LOCAL_BALL, r0_ball=r0)
    r_max = r0

    points = iter(enumerate(stream, start=1))
    pending: Optional[Tuple[int, np.ndarray]] = None
    for t, z in points:
        z = _check_point(z, t)
        dist = float(np.linalg.norm(z - c0))
        if dist > gate:
            pending = (t, z)
            break
        prev = state
        if dist > r_max:
            r_max = dist
            state = RoundingState(Ellipsoid.ball(c0, r_max), alpha=r0 / r_max,
                                  phase=Phase.LOCAL_BALL, r0_ball=r0)
            kind = "local"
        else:
            kind = "skip"
        report.append(StepRecord(t, state.alpha, log_volume(state.ellipsoid), kind, 0.0))
        if on_step is not None:
            on_step(t, prev, state, z, kind, 0.0)
        _observe_aspect(report, state)

    if pending is not None:
        # transition: grow the ball to its maximum allowed size; the
        # update rule needs alpha <= 1/2, so small dimensions are clamped
        alpha0 = min(0.5, 1.0 / (d * math.log(d)))
        state = RoundingState(Ellipsoid.ball(c0, gate), alpha=alpha0,
                              phase=Phase.FULL, r0_ball=r0)
        t, z = pending
        while True:
            prev = state
            state, params = full_update_detailed(state, z, use_rank_one=use_rank_one)
            if params is None:
                kind, gamma = "skip", 0.0
            else:
                kind, gamma = "regular", params.gamma
            report.append(StepRecord(t, state.alpha, log_volume(state.ellipsoid),
                                     kind, gamma))
            if on_step is not None:
                on_step(t, prev, state, z, kind, gamma)
            _observe_aspect(report, state)
            try:
                t, z = next(points)
            except StopIteration:
                break
            z = _check_point(z, t)

    report.final_alpha_inv = state.alpha_inv
    return state, report


def run_fully_online(
    stream: Iterable[np.ndarray],
    on_step: Optional[StepObserver] = None,
    use_rank_one: bool = False,
) -> Tuple[RoundingState, RunReport]:
    """Online rounding with no seed: the first point initializes a rank-0
    state and every span-raising point triggers an irregular step.
    """
    report = RunReport()
    state: Optional[RoundingState] = None
    for t, z in enumerate(stream, start=1):
        z = _check_point(z, t)
        if state is None:
            state = RoundingState(Ellipsoid.point(z), alpha=1.0)
            report.append(StepRecord(t, 1.0, 0.0, "init", 0.0))
            if on_step is not None:
                on_step(t, state, state, z, "init", 0.0)
            continue
        prev = state
        if state.dim == 0:
            delta = float(np.linalg.norm(z - state.center))
            if delta <= SPAN_TOL:
                kind, gamma = "skip", 0.0
            else:
                state = irregular_update(state, z)
                kind, gamma = "irregular", 0.0
        elif is_off_span(state, z):
            state = irregular_update(state, z)
            kind, gamma = "irregular", 0.0
        else:
            state, params = full_update_detailed(state, z, use_rank_one=use_rank_one)
            if params is None:
                kind, gamma = "skip", 0.0
            else:
                kind, gamma = "regular", params.gamma
        report.append(StepRecord(t, state.alpha, log_volume(state.ellipsoid),
                                 kind, gamma))
        if on_step is not None:
            on_step(t, prev, state, z, kind, gamma)
        _observe_aspect(report, state)

    if state is None:
        raise ValueError("empty stream")
    report.final_alpha_inv = state.alpha_inv
    return state, report
