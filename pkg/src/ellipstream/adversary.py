"""Lower-bound adversary: a point stream that forces any monotone rule to
pay approximation factor for volume.

Phase I feeds the vertices of a regular simplex circumscribing the unit
ball; Phase II repeatedly serves a point on the boundary of the doubled
outer ellipsoid (staying inside the R-ball) until the outer volume
reaches that of the R/2 ball or no such point exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Tuple

import numpy as np

from .ellipsoid import Ellipsoid, log_volume
from .linalg import orthonormal_completion
from .state import RoundingState
from .update_rule import full_update

UpdateRule = Callable[[RoundingState, np.ndarray], RoundingState]

_QMC_SEED = 1729


class AdversaryError(ValueError):
    pass


@dataclass
class AdversaryTrace:
    points: List[np.ndarray] = field(default_factory=list)
    a_values: List[float] = field(default_factory=list)  # 1/alpha after each step
    p_values: List[float] = field(default_factory=list)  # log outer volume ratio
    step_kinds: List[str] = field(default_factory=list)  # simplex | shell
    stop_reason: str = ""

    @property
    def phase2_steps(self) -> int:
        return sum(1 for k in self.step_kinds if k == "shell")

    def to_csv(self) -> str:
        lines = ["t,A_t,P_t,step_kind"]
        for t, (a, p, k) in enumerate(zip(self.a_values, self.p_values,
                                          self.step_kinds), start=1):
            lines.append(f"{t},{a!r},{p!r},{k}")
        return "\n".join(lines) + "\n"


def simplex_vertices(d: int) -> np.ndarray:
    """The d+1 vertices of a regular simplex circumscribing the unit ball.

    Constructed from the standard simplex in one dimension up: centered,
    rotated into the hyperplane orthogonal to the all-ones vector, and
    scaled so the inradius is exactly 1 (making the circumradius d).
    """
    if d < 2:
        raise AdversaryError("dimension must be at least 2")
    ones = np.full(d + 1, 1.0 / math.sqrt(d + 1))
    frame = orthonormal_completion(ones)
    basis = frame[:, 1:]  # orthonormal basis of the sum-zero hyperplane
    eye = np.eye(d + 1)
    centered = eye - 1.0 / (d + 1)
    coords = centered @ basis  # rows: centered vertices in d coordinates
    scale = math.sqrt(d * (d + 1))  # takes vertex norm sqrt(d/(d+1)) to d
    return coords * scale


def library_rule(state: RoundingState, z: np.ndarray) -> RoundingState:
    """This library's own update, with the initial alpha clamped to the
    update rule's valid range (shrinking the inner body is always a
    legal monotone move)."""
    if state.alpha > 0.5:
        state = replace(state, alpha=0.5)
    return full_update(state, z)


def _sphere_directions(n: int, d: int) -> np.ndarray:
    from scipy.stats import norm, qmc

    sampler = qmc.Sobol(d=d, scramble=True, seed=_QMC_SEED)
    u = sampler.random(n)
    # keep strictly inside (0,1) before the Gaussian transform
    u = np.clip(u, 1e-12, 1.0 - 1e-12)
    g = norm.ppf(u)
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return g / norms


def shell_point(state: RoundingState, r_cap: float) -> Optional[np.ndarray]:
    """A point of boundary(center + 2E) with norm at most r_cap, if any.

    Deterministic: the 2d signed semiaxis endpoints are tried first in
    order of increasing norm; failing that, 4096 quasi-random boundary
    directions are scanned and the smallest-norm candidate is returned if
    it fits.
    """
    body = state.ellipsoid
    if body.rank != body.dim:
        raise AdversaryError("shell search needs a full-rank state")
    c = body.center
    candidates = []
    for i in range(body.rank):
        step = 2.0 * body.semiaxes[i] * body.axes[:, i]
        candidates.append(c + step)
        candidates.append(c - step)
    candidates.sort(key=lambda p: float(np.linalg.norm(p)))
    for p in candidates:
        if np.linalg.norm(p) <= r_cap * (1.0 + 1e-12):
            return p
    dirs = _sphere_directions(4096, body.rank)
    pts = c[None, :] + 2.0 * (dirs * body.semiaxes[None, :]) @ body.axes.T
    norms = np.linalg.norm(pts, axis=1)
    j = int(np.argmin(norms))
    if norms[j] <= r_cap * (1.0 + 1e-12):
        return pts[j]
    return None


def run_adversary(rule: UpdateRule, d: int, r_big: float,
                  max_steps: int = 100000) -> AdversaryTrace:
    """Drive a monotone rule with the adversarial stream.

    The trace records A_t = 1/alpha_t and P_t = log-volume ratio after
    every fed point. Basic monotonicity (alpha never grows back, volume
    never shrinks) is spot-checked on every step.
    """
    if d < 2:
        raise AdversaryError("dimension must be at least 2")
    if r_big < 1.0:
        raise AdversaryError("outer radius must be at least 1")
    state = RoundingState(Ellipsoid.ball(np.zeros(d), 1.0), alpha=1.0)
    trace = AdversaryTrace()

    def feed(z: np.ndarray, kind: str) -> None:
        nonlocal state
        prev_alpha = state.alpha
        prev_vol = log_volume(state.ellipsoid)
        state = rule(state, np.asarray(z, dtype=float))
        if state.alpha > prev_alpha + 1e-12 or \
                log_volume(state.ellipsoid) < prev_vol - 1e-9:
            raise AdversaryError("non-monotone rule")
        trace.points.append(np.asarray(z, dtype=float))
        trace.a_values.append(state.alpha_inv)
        trace.p_values.append(log_volume(state.ellipsoid))
        trace.step_kinds.append(kind)

    for v in simplex_vertices(d):
        feed(v, "simplex")

    target = d * math.log(r_big / 2.0)
    for _ in range(max_steps):
        if log_volume(state.ellipsoid) > target:
            trace.stop_reason = "volume_reached"
            break
        z = shell_point(state, r_big)
        if z is None:
            trace.stop_reason = "shell_empty"
            break
        feed(z, "shell")
    else:
        raise AdversaryError("adversary did not terminate")
    return trace


# ---------------------------------------------------------------------------
# reduced-case grid for the per-step reverse evolution bound


@dataclass(frozen=True)
class ReducedCaseReport:
    n_points: int
    min_ratio: float
    c_observed: float
    min_slack: float


def reduced_case_grid(
    d_values: Tuple[int, ...] = (2, 3, 4, 5, 6, 7, 8),
    n_a: int = 24,
    n_b: int = 24,
    n_big_a: int = 16,
    n_c: int = 60,
) -> ReducedCaseReport:
    """Numerically probe the hardest monotone update in the reduced
    two-ellipse configuration (previous sandwich = unit ball pair scaled
    by 1/A, new point at distance 2 on the long axis).

    For every grid cell the largest feasible next inner scale is computed
    from the width, reach, and tangent-line constraints, giving the
    smallest possible step ratio dA/dP; the report carries the minimal
    constant observed wherever the A/(10 d) branch is not the binding one.
    """
    a_grid = np.geomspace(1.5, 50.0, n_a)
    b_grid = np.geomspace(1.0, 50.0, n_b)
    big_a_grid = np.geomspace(1.0, 200.0, n_big_a)

    ratios = []
    bounds = []
    for d in d_values:
        for big_a in big_a_grid:
            alpha = 1.0 / big_a
            for a in a_grid:
                c_lo = max(-alpha, 2.0 - a) + 1e-9
                c_hi = a - 1.0
                if c_hi <= c_lo:
                    continue
                c_grid = np.linspace(c_lo, c_hi, n_c)
                for b in b_grid:
                    width = alpha / b
                    reach = (c_grid + alpha) / a
                    with np.errstate(invalid="ignore"):
                        tangent = ((2.0 - c_grid) * (alpha / 2.0)
                                   / math.sqrt(1.0 - (alpha / 2.0) ** 2)) / b
                    alpha_next = np.minimum(width, np.minimum(reach, tangent))
                    best = float(alpha_next.max())
                    if best <= 0.0:
                        continue
                    delta_a = 1.0 / best - big_a
                    delta_p = math.log(a) + (d - 1) * math.log(b)
                    ratios.append(delta_a / delta_p)
                    bounds.append(big_a / (10.0 * d))

    ratios_arr = np.asarray(ratios)
    bounds_arr = np.asarray(bounds)
    below = ratios_arr < bounds_arr
    c_observed = float(ratios_arr[below].min()) if np.any(below) \
        else float(ratios_arr.min())
    slack = ratios_arr - np.minimum(c_observed, bounds_arr)
    return ReducedCaseReport(
        n_points=len(ratios),
        min_ratio=float(ratios_arr.min()),
        c_observed=c_observed,
        min_slack=float(slack.min()),
    )
