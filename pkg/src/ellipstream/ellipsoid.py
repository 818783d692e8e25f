"""Ellipsoid values: membership, support, volume, and exact containment.

An ellipsoid is stored as a center plus orthonormal axis directions with
strictly positive semiaxis lengths; the rank may be below the ambient
dimension, in which case the body lives in the affine span of its axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import ORTHO_TOL, LinalgError

# a semiaxis below this fraction of the largest one means the body has
# effectively collapsed a dimension; such bodies are rejected outright
RANK_COLLAPSE_RATIO = 1e-10

# containment verdicts operate on the normalized (unit-ball) scale
CONTAINMENT_TOL = 1e-8

_FALSIFIER_SEED = 20260823


class EllipsoidError(ValueError):
    pass


@dataclass(frozen=True)
class Ellipsoid:
    """{center + sum_i t_i * semiaxes[i] * axes[:, i] : sum t_i^2 <= 1}.

    `axes` is d x k with orthonormal columns, `semiaxes` length-k positive,
    stored in descending order. k == 0 encodes a single point.
    """

    center: np.ndarray
    axes: np.ndarray
    semiaxes: np.ndarray

    def __post_init__(self):
        center = np.atleast_1d(np.asarray(self.center, dtype=float))
        axes = np.asarray(self.axes, dtype=float)
        semiaxes = np.atleast_1d(np.asarray(self.semiaxes, dtype=float))
        if axes.ndim != 2 or axes.shape[0] != center.shape[0]:
            raise EllipsoidError("axes must be d x k")
        if semiaxes.shape[0] != axes.shape[1]:
            raise EllipsoidError("one semiaxis length per axis")
        if not (np.all(np.isfinite(center)) and np.all(np.isfinite(axes))
                and np.all(np.isfinite(semiaxes))):
            raise EllipsoidError("non-finite entries")
        if semiaxes.size:
            if np.any(semiaxes <= 0):
                raise EllipsoidError("semiaxes must be strictly positive")
            if semiaxes.min() < RANK_COLLAPSE_RATIO * semiaxes.max():
                raise EllipsoidError("dimension collapse: semiaxis ratio below threshold")
            order = np.argsort(-semiaxes, kind="stable")
            semiaxes = semiaxes[order]
            axes = axes[:, order]
            k = axes.shape[1]
            if np.linalg.norm(axes.T @ axes - np.eye(k)) > ORTHO_TOL:
                raise EllipsoidError("axes not orthonormal")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "semiaxes", semiaxes)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def rank(self) -> int:
        return self.axes.shape[1]

    @staticmethod
    def ball(center: np.ndarray, radius: float) -> "Ellipsoid":
        center = np.atleast_1d(np.asarray(center, dtype=float))
        d = center.shape[0]
        return Ellipsoid(center, np.eye(d), np.full(d, float(radius)))

    @staticmethod
    def point(center: np.ndarray) -> "Ellipsoid":
        center = np.atleast_1d(np.asarray(center, dtype=float))
        d = center.shape[0]
        return Ellipsoid(center, np.zeros((d, 0)), np.zeros(0))

    def scaled(self, factor: float) -> "Ellipsoid":
        """The ellipsoid scaled about its own center."""
        if self.rank == 0:
            return self
        return Ellipsoid(self.center, self.axes, self.semiaxes * factor)


@dataclass(frozen=True)
class ScaledEllipsoid:
    """center + alpha * (body - center), for alpha in (0, 1]."""

    body: Ellipsoid
    alpha: float

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise EllipsoidError("alpha must be in (0, 1]")

    def as_ellipsoid(self) -> Ellipsoid:
        return self.body.scaled(self.alpha)


def membership(e: Ellipsoid, x: np.ndarray, tol: float = CONTAINMENT_TOL) -> float:
    """Signed margin of x against e; <= 0 means inside.

    For rank-deficient bodies an off-span component beyond tol (relative to
    the distance from the center) yields +inf.
    """
    x = np.asarray(x, dtype=float)
    delta = x - e.center
    t = e.axes.T @ delta
    residual = delta - e.axes @ t
    rnorm = np.linalg.norm(residual)
    if e.rank < e.dim and rnorm > tol * max(np.linalg.norm(delta), 1e-300):
        return math.inf
    if e.rank == 0:
        return 0.0 if rnorm == 0.0 else math.inf
    return float(np.linalg.norm(t / e.semiaxes) - 1.0)


def log_volume(e: Ellipsoid) -> float:
    """log of vol_k(e) / vol_k(unit k-ball); 0 for a rank-0 body."""
    if e.rank == 0:
        return 0.0
    return float(np.sum(np.log(e.semiaxes)))


def support(e: Ellipsoid, u: np.ndarray) -> float:
    """Support function h_e(u) = max over x in e of <x, u>."""
    u = np.asarray(u, dtype=float)
    base = float(np.dot(e.center, u))
    if e.rank == 0:
        return base
    proj = e.semiaxes * (e.axes.T @ u)
    return base + float(np.linalg.norm(proj))


def _max_norm_over_ellipsoid(c: np.ndarray, m: np.ndarray) -> float:
    """max of ||c + m @ s|| over ||s|| <= 1, solved via the secular equation.

    The maximizer sits on the unit sphere (convex maximization), where the
    stationarity condition (lam*I - m.T m) s = m.T c admits a monotone
    one-parameter search over the multiplier lam above the top eigenvalue.
    """
    if m.size == 0:
        return float(np.linalg.norm(c))
    gram = m.T @ m
    lam, q = np.linalg.eigh(gram)
    g = q.T @ (m.T @ c)
    lam_top = lam[-1]
    cc = float(np.dot(c, c))
    gnorm = float(np.linalg.norm(g))
    top_mask = lam > lam_top - 1e-12 * max(1.0, abs(lam_top))
    g_top = float(np.linalg.norm(g[top_mask]))
    if gnorm < 1e-15:
        # center component along the ellipsoid image is negligible; the
        # best direction is the top semiaxis
        return math.sqrt(max(0.0, lam_top + cc))

    def phi(mu):
        return float(np.sum((g / (mu - lam)) ** 2))

    if g_top < 1e-14 * gnorm:
        # hard case: no forcing along the top eigenspace. Spend the leftover
        # norm budget on the top eigenvector at mu = lam_top.
        denom = lam_top - lam
        safe = denom > 1e-14 * max(1.0, abs(lam_top))
        s = np.zeros_like(g)
        s[safe] = g[safe] / denom[safe]
        # note the stationarity sign: s = g / (mu - lam) maximizes
        rest = 1.0 - float(np.dot(s, s))
        if rest > 0.0:
            tau = math.sqrt(rest)
            val2 = float(np.sum(lam * s * s) + 2.0 * np.dot(g, s) + cc
                         + lam_top * tau * tau)
            return math.sqrt(max(0.0, val2))
        # fall through to the regular search if the budget is exhausted

    lo = lam_top + 1e-18 + 1e-15 * max(1.0, abs(lam_top))
    hi = lam_top + gnorm + 1e-15
    # phi decreases from (near) infinity to <= 1 on [lo, hi]
    while phi(hi) > 1.0:
        hi = lam_top + 2.0 * (hi - lam_top)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if phi(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    mu = hi
    s = g / (mu - lam)
    nrm = np.linalg.norm(s)
    if nrm > 0:
        s = s / nrm
    val2 = float(np.sum(lam * s * s) + 2.0 * np.dot(g, s) + cc)
    return math.sqrt(max(0.0, val2))


def _unit_directions(n: int, k: int, seed: int = _FALSIFIER_SEED) -> np.ndarray:
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((n, k))
    norms = np.linalg.norm(u, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return u / norms


def containment_margin(outer: Ellipsoid, inner: Ellipsoid,
                       n_falsifiers: int = 2048) -> float:
    """max reach of `inner` in `outer`'s unit-ball coordinates, minus 1.

    Nonpositive means contained. Combines the exact one-parameter search
    with sampled support directions acting as a falsifier.
    """
    if outer.dim != inner.dim:
        raise EllipsoidError("dimension mismatch")
    if inner.rank > outer.rank:
        return math.inf
    # the inner span and the center offset must lie inside the outer span
    off = inner.center - outer.center
    off_residual = off - outer.axes @ (outer.axes.T @ off)
    if np.linalg.norm(off_residual) > CONTAINMENT_TOL * max(1.0, np.linalg.norm(off)):
        return math.inf
    if inner.rank:
        ax_residual = inner.axes - outer.axes @ (outer.axes.T @ inner.axes)
        if np.linalg.norm(ax_residual, axis=0).max() > CONTAINMENT_TOL:
            return math.inf
    inv_s = 1.0 / outer.semiaxes
    c_prime = inv_s * (outer.axes.T @ off)
    if inner.rank:
        m = (inv_s[:, None]) * (outer.axes.T @ inner.axes) * inner.semiaxes[None, :]
    else:
        m = np.zeros((outer.rank, 0))
    reach = _max_norm_over_ellipsoid(c_prime, m)
    if m.size:
        dirs = _unit_directions(n_falsifiers, outer.rank)
        sampled = dirs @ c_prime + np.linalg.norm(dirs @ m, axis=1)
        reach = max(reach, float(sampled.max()))
    else:
        reach = max(reach, float(np.linalg.norm(c_prime)))
    return reach - 1.0


def contains_ellipsoid(outer: Ellipsoid, inner: Ellipsoid,
                       tol: float = CONTAINMENT_TOL) -> bool:
    """True iff inner is inside outer, up to tol on the normalized scale."""
    try:
        margin = containment_margin(outer, inner)
    except LinalgError:
        return False
    return margin <= tol
