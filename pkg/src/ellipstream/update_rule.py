"""The monotone sandwich update: per-step scalars, the gamma solve, the
regular full-dimensional step, and the dimension-raising irregular step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import linalg
from .ellipsoid import Ellipsoid
from .state import RoundingState

# a point counts as off-span once its orthogonal residual exceeds this
# fraction of max(1, distance from the center); far above SVD noise
SPAN_TOL = 1e-8

GAMMA_MAX_ITER = 200
GAMMA_REL_RESIDUAL = 1e-10


class UpdateError(ValueError):
    pass


@dataclass(frozen=True)
class UpdateParams:
    """Scalars (gamma, a, b, c, alpha') of one regular update step."""

    gamma: float
    a: float
    b: float
    c: float
    alpha_next: float


def compute_params(gamma: float, alpha: float) -> UpdateParams:
    """Evaluate the update scalars at a given gamma and previous alpha.

    a = e^gamma grows the axis pointing at the new point, b pads the
    orthogonal axes, c shifts the center, and alpha' follows the harmonic
    rule 1/alpha' = 1/alpha + 2*gamma.
    """
    if not (0.0 < alpha <= 0.5):
        raise UpdateError("alpha must lie in (0, 1/2]")
    if gamma < 0.0:
        raise UpdateError("gamma must be nonnegative")
    a = math.exp(gamma)
    alpha_next = 1.0 / (1.0 / alpha + 2.0 * gamma)
    b = 1.0 + (alpha - alpha_next) / 2.0
    c = -alpha + alpha_next * a
    return UpdateParams(gamma=gamma, a=a, b=b, c=c, alpha_next=alpha_next)


def _a_plus_c(gamma: float, alpha: float) -> float:
    alpha_next = 1.0 / (1.0 / alpha + 2.0 * gamma)
    return math.exp(gamma) * (1.0 + alpha_next) - alpha


def solve_gamma(rho: float, alpha: float) -> float:
    """Smallest gamma with a(gamma) + c(gamma) in [rho, rho*(1+1e-10)].

    The map gamma -> a + c equals 1 at gamma = 0 and is strictly
    increasing, so a plain bisection on [0, log(rho)+1] works. The upper
    end of the residual window is returned deliberately: overshooting
    keeps the new point covered.
    """
    if not (rho > 1.0):
        raise UpdateError("rho must exceed 1")
    if not (0.0 < alpha <= 0.5):
        raise UpdateError("alpha must lie in (0, 1/2]")
    lo = 0.0
    hi = math.log(rho) + 1.0
    if _a_plus_c(hi, alpha) < rho:
        raise UpdateError("bisection bracket failed")
    target_hi = rho * (1.0 + 1e-10)
    for _ in range(GAMMA_MAX_ITER):
        f_hi = _a_plus_c(hi, alpha)
        if rho <= f_hi <= target_hi:
            return hi
        mid = 0.5 * (lo + hi)
        if _a_plus_c(mid, alpha) >= rho:
            hi = mid
        else:
            lo = mid
    f_hi = _a_plus_c(hi, alpha)
    if rho <= f_hi <= rho * (1.0 + 1e-8):
        return hi
    raise UpdateError("gamma bisection did not converge")


def _off_span_split(state: RoundingState, z: np.ndarray):
    """Split z - center into its span part and orthogonal residual."""
    delta = np.asarray(z, dtype=float) - state.center
    axes = state.ellipsoid.axes
    coeffs = axes.T @ delta
    residual = delta - axes @ coeffs
    return delta, coeffs, residual


def is_off_span(state: RoundingState, z: np.ndarray) -> bool:
    delta, _, residual = _off_span_split(state, z)
    return float(np.linalg.norm(residual)) > SPAN_TOL * max(1.0, float(np.linalg.norm(delta)))


def full_update_detailed(
    state: RoundingState, z: np.ndarray, use_rank_one: bool = False
) -> Tuple[RoundingState, Optional[UpdateParams]]:
    """One regular step; returns the next state and the scalars used.

    Returns (state, None) unchanged when the point is already covered.
    """
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise UpdateError("non-finite point")
    if state.alpha > 0.5 + 1e-12:
        raise UpdateError("alpha must lie in (0, 1/2]")
    if state.dim == 0:
        raise UpdateError("irregular step required")
    delta, coeffs, residual = _off_span_split(state, z)
    if float(np.linalg.norm(residual)) > SPAN_TOL * max(1.0, float(np.linalg.norm(delta))):
        raise UpdateError("irregular step required")

    body = state.ellipsoid
    s = body.semiaxes
    # u is the new point in the outer body's unit-ball coordinates
    u = coeffs / s
    rho = float(np.linalg.norm(u))
    if rho <= 1.0:
        return state, None

    params = compute_params(solve_gamma(rho, state.alpha), state.alpha)
    w = u / rho

    # compose the shrink map with the current factor, both in axis coords
    if use_rank_one:
        k = s.shape[0]
        # diag(1/(b*s)) as a valid factor: conjugating by the reversal
        # permutation puts the diagonal in descending order
        perm = np.eye(k)[:, ::-1]
        base = linalg.SvdFactor(perm, (1.0 / (params.b * s))[::-1], perm)
        y1 = (1.0 / params.a - 1.0 / params.b) * w
        y2 = w / s
        updated = linalg.svd_rank_one_update(base, y1, y2)
        new_axes = body.axes @ updated.right_axes
        new_semiaxes = 1.0 / updated.singular_values
    else:
        core = np.diag(1.0 / (params.b * s))
        core += np.outer((1.0 / params.a - 1.0 / params.b) * w, w / s)
        cu, cs, cvt = np.linalg.svd(core)
        new_axes = body.axes @ cvt.T
        new_semiaxes = 1.0 / cs
        # ascending after inversion; the Ellipsoid constructor re-sorts

    # center moves along the pre-image of w
    center_shift = body.axes @ (s * w) * params.c
    new_body = Ellipsoid(body.center + center_shift, new_axes, new_semiaxes)
    return state.with_body(new_body, params.alpha_next), params


def full_update(state: RoundingState, z: np.ndarray,
                use_rank_one: bool = False) -> RoundingState:
    """Regular monotone step (skip when the point is already covered)."""
    new_state, _ = full_update_detailed(state, z, use_rank_one=use_rank_one)
    return new_state


def irregular_update(state: RoundingState, z: np.ndarray) -> RoundingState:
    """Dimension-raising step: extend the span toward z.

    In normalized coordinates the previous body is the unit ball of its
    span and z maps onto sqrt(1+2*alpha) times the new basis vector; the
    new outer body is the ball of radius (1+alpha)/sqrt(1+2*alpha) in the
    extended span, recentred a fraction alpha/(1+2*alpha) of the way
    toward z. 1/alpha grows by exactly one.
    """
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise UpdateError("non-finite point")
    if not (0.0 < state.alpha <= 1.0):
        raise UpdateError("alpha must lie in (0, 1]")
    delta, coeffs, residual = _off_span_split(state, z)
    rnorm = float(np.linalg.norm(residual))
    if rnorm <= SPAN_TOL * max(1.0, float(np.linalg.norm(delta))):
        raise UpdateError("regular step required")

    alpha = state.alpha
    body = state.ellipsoid
    k = body.rank
    v_new = residual / rnorm
    root = math.sqrt(1.0 + 2.0 * alpha)

    # all linear algebra happens in the extended-span basis [axes, v_new]
    z_w = np.concatenate([coeffs, [rnorm]])
    a_bar = np.ones(k + 1)
    a_bar[:k] = 1.0 / body.semiaxes
    m_w = np.eye(k + 1)
    m_w[:, k] -= (z_w - root * np.eye(k + 1)[:, k]) / z_w[k]
    composed = (a_bar[:, None]) * m_w
    cu, cs, cvt = np.linalg.svd(composed)
    scale = (1.0 + alpha) / root
    w_basis = np.hstack([body.axes, v_new[:, None]])
    new_axes = w_basis @ cvt.T
    new_semiaxes = scale / cs
    new_center = body.center + (alpha / (1.0 + 2.0 * alpha)) * delta
    new_alpha = 1.0 / (1.0 / alpha + 1.0)
    new_body = Ellipsoid(new_center, new_axes, new_semiaxes)
    return state.with_body(new_body, new_alpha)
