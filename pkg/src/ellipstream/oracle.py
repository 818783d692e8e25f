"""Brute-force and exact verification utilities.

Everything in this module exists to check the geometry layer from the
outside: hull membership by LP, support-function dominance, per-step
monotonicity certificates, an offline enclosing-ellipsoid baseline, Gram
determinants, and dense grids over the closed-form scalar inequalities the
update rule relies on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .ellipsoid import (
    Ellipsoid,
    ScaledEllipsoid,
    containment_margin,
    log_volume,
    membership,
    support,
)
from .state import RoundingState
from .update_rule import compute_params, solve_gamma

LP_TOL = 1e-9
_DIR_SEED = 987654321


class OracleError(ValueError):
    pass


# ---------------------------------------------------------------------------
# hull membership via a dense phase-1 simplex


def _phase1_simplex(a_eq: np.ndarray, b_eq: np.ndarray) -> float:
    """Minimal artificial-variable sum for {x >= 0 : a_eq @ x = b_eq}.

    Textbook dense tableau with Bland's rule; the instances here are tiny,
    so robustness wins over speed.
    """
    m, n = a_eq.shape
    a = a_eq.copy()
    b = b_eq.copy()
    flip = b < 0
    a[flip] *= -1.0
    b[flip] *= -1.0

    # tableau columns: x (n), artificials (m), rhs
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = a
    tab[:m, n:n + m] = np.eye(m)
    tab[:m, -1] = b
    # objective: minimize sum of artificials (stored as its negation)
    tab[m, :n] = -a.sum(axis=0)
    tab[m, -1] = -b.sum()
    basis = list(range(n, n + m))

    for _ in range(20000):
        # Bland: entering variable is the lowest index with a negative cost
        enter = -1
        for j in range(n + m):
            if tab[m, j] < -LP_TOL:
                enter = j
                break
        if enter < 0:
            break
        ratios = np.full(m, np.inf)
        col = tab[:m, enter]
        pos = col > LP_TOL
        ratios[pos] = tab[:m, -1][pos] / col[pos]
        if not np.any(np.isfinite(ratios)):
            raise OracleError("unbounded phase-1 LP (should not happen)")
        best = np.min(ratios)
        # Bland again on ties: lowest basis index leaves
        leave = min((basis[i], i) for i in range(m)
                    if pos[i] and ratios[i] <= best + LP_TOL)[1]
        pivot = tab[leave, enter]
        tab[leave] /= pivot
        for i in range(m + 1):
            if i != leave and abs(tab[i, enter]) > 0:
                tab[i] -= tab[i, enter] * tab[leave]
        basis[leave] = enter
    return float(-tab[m, -1])


def hull_membership(points: Sequence[np.ndarray], x: np.ndarray) -> bool:
    """Is x a convex combination of the given points?"""
    pts = np.asarray(points, dtype=float)
    x = np.asarray(x, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise OracleError("need at least one point")
    if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(x))):
        raise OracleError("non-finite inputs")
    n, d = pts.shape
    scale = max(1.0, float(np.abs(pts).max()), float(np.abs(x).max()))
    a_eq = np.vstack([pts.T / scale, np.ones((1, n))])
    b_eq = np.concatenate([x / scale, [1.0]])
    return _phase1_simplex(a_eq, b_eq) <= 10 * LP_TOL


# ---------------------------------------------------------------------------
# hull-of-union support


@dataclass(frozen=True)
class HullSpec:
    """conv of a union of points and scaled ellipsoids."""

    point_list: Tuple[np.ndarray, ...] = ()
    ellipsoid_list: Tuple[ScaledEllipsoid, ...] = ()

    def __post_init__(self):
        if not self.point_list and not self.ellipsoid_list:
            raise OracleError("empty hull spec")


def hull_support(h: HullSpec, u: np.ndarray) -> float:
    """Support of the union hull: max over member supports."""
    u = np.asarray(u, dtype=float)
    vals = [float(np.dot(p, u)) for p in h.point_list]
    vals += [support(se.as_ellipsoid(), u) for se in h.ellipsoid_list]
    return max(vals)


def _project_simplex_combination(atoms: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Weights of the closest point to x in conv(atoms)."""
    from scipy.optimize import minimize

    m = atoms.shape[0]
    if m == 1:
        return np.ones(1)

    def objective(lam):
        r = lam @ atoms - x
        return 0.5 * float(r @ r), atoms @ r

    res = minimize(objective, np.full(m, 1.0 / m), jac=True, method="SLSQP",
                   bounds=[(0.0, 1.0)] * m,
                   constraints=[{"type": "eq", "fun": lambda l: l.sum() - 1.0,
                                 "jac": lambda l: np.ones(m)}],
                   options={"maxiter": 200, "ftol": 1e-18})
    lam = np.clip(res.x, 0.0, None)
    return lam / lam.sum()


def union_hull_distance(h: HullSpec, x: np.ndarray, tol: float = 1e-9,
                        max_iter: int = 200) -> float:
    """Distance from x to conv(points union ellipsoids), by fully
    corrective Frank-Wolfe.

    Each round asks every member for its farthest point against the
    current gradient (trivial for both points and ellipsoids), adds it to
    an atom set, and re-projects exactly onto the hull of the atoms. The
    duality gap gives a certified stopping rule.
    """
    x = np.asarray(x, dtype=float)
    pts = (np.asarray(h.point_list, dtype=float)
           if h.point_list else np.zeros((0, x.shape[0])))

    def lmo(g):
        best, val = None, math.inf
        if pts.shape[0]:
            i = int(np.argmin(pts @ g))
            best, val = pts[i], float(pts[i] @ g)
        for se in h.ellipsoid_list:
            e = se.as_ellipsoid()
            gn = float(np.linalg.norm(g))
            if gn == 0.0:
                cand = e.center
            else:
                w = -(e.axes.T @ g)
                coeff = e.semiaxes * w
                cn = float(np.linalg.norm(coeff))
                step = (e.axes @ (e.semiaxes * coeff / cn)) if cn > 0 \
                    else np.zeros_like(e.center)
                cand = e.center + step
            v = float(cand @ g)
            if v < val:
                best, val = cand, v
        return best

    atoms = [lmo(-x)]
    y = atoms[0]
    for _ in range(max_iter):
        g = y - x
        dist = float(np.linalg.norm(g))
        if dist <= tol:
            return dist
        s = lmo(g)
        gap = float(g @ (y - s))
        # gap bounds f(y) - f*; a tiny gap certifies y is essentially optimal
        if gap <= 0.5 * tol * tol:
            return dist
        atoms.append(s)
        stack = np.asarray(atoms)
        lam = _project_simplex_combination(stack, x)
        keep = lam > 1e-14
        atoms = [a for a, k in zip(atoms, keep) if k]
        y = lam[keep] @ stack[keep]
    return float(np.linalg.norm(y - x))


# ---------------------------------------------------------------------------
# monotone-step certification


@dataclass(frozen=True)
class StepCertificate:
    outer_ok: bool
    inner_ok: bool
    worst_margin: float
    violating_direction: Optional[np.ndarray] = None
    method: str = "slice+sampling"

    def to_json(self) -> str:
        payload = {
            "outer_ok": self.outer_ok,
            "inner_ok": self.inner_ok,
            "worst_margin": self.worst_margin,
            "violating_direction": (None if self.violating_direction is None
                                    else list(map(float, self.violating_direction))),
            "method": self.method,
        }
        return json.dumps(payload, sort_keys=True)


SandwichLike = Union[RoundingState, Tuple[np.ndarray, Ellipsoid, float]]


def _as_sandwich(s: SandwichLike) -> Tuple[np.ndarray, Ellipsoid, float]:
    if isinstance(s, RoundingState):
        return s.center, s.ellipsoid, s.alpha
    center, body, alpha = s
    return np.asarray(center, dtype=float), body, float(alpha)


def _normalized_frame(prev_body: Ellipsoid, prev_center: np.ndarray,
                      z: np.ndarray):
    """Linear map sending the previous outer body to the unit ball.

    Returns (project, k, z_norm) where `project` maps ambient vectors
    (already shifted by prev_center) into normalized span coordinates.
    For a span-raising step the frame is extended by the residual
    direction and composed with the shear that pins the new point onto
    the fresh axis, so the constructed bodies become bodies of revolution
    about the last coordinate.
    """
    axes = prev_body.axes
    s = prev_body.semiaxes
    delta = z - prev_center
    coeffs = axes.T @ delta
    residual = delta - axes @ coeffs
    rnorm = float(np.linalg.norm(residual))
    off_span = rnorm > 1e-8 * max(1.0, float(np.linalg.norm(delta)))
    k = prev_body.rank
    if not off_span:
        def project(vecs: np.ndarray) -> np.ndarray:
            return (axes.T @ vecs) / s[:, None]
        z_norm = coeffs / s
        return project, k, z_norm, False
    v_new = residual / rnorm
    w_basis = np.hstack([axes, v_new[:, None]])
    a_bar = np.concatenate([1.0 / s, [1.0]])
    z_w = np.concatenate([coeffs, [rnorm]])
    # shear sending z onto the new axis at its original normalized height;
    # it fixes the old span, so the constructed bodies stay rotation
    # symmetric about the last coordinate
    m = np.eye(k + 1)
    m[:, k] -= (z_w - z_w[k] * np.eye(k + 1)[:, k]) / z_w[k]

    def project(vecs: np.ndarray) -> np.ndarray:
        return a_bar[:, None] * (m @ (w_basis.T @ vecs))

    z_norm = project(delta[:, None])[:, 0]
    return project, k + 1, z_norm, True


def check_monotone_step(prev: SandwichLike, next_: SandwichLike,
                        z: np.ndarray, tol: float = 1e-7,
                        n_sample_dirs: int = 4096,
                        n_slice: int = 2048) -> StepCertificate:
    """Certify one monotone step: outer growth + coverage, inner inclusion.

    The inner inclusion is checked in coordinates where the previous outer
    body is the unit ball: there the previous inner body is a centered
    ball, and a fine sweep over a 2-D slice through the new point's
    direction (exact for the rotation-symmetric bodies the update rule
    builds) is combined with random full-dimensional directions that act
    as a falsifier.
    """
    prev_c, prev_e, prev_a = _as_sandwich(prev)
    next_c, next_e, next_a = _as_sandwich(next_)
    z = np.asarray(z, dtype=float)
    if prev_e.dim != next_e.dim or prev_e.dim != z.shape[0]:
        raise OracleError("span mismatch")

    margins: List[Tuple[float, Optional[np.ndarray]]] = []

    # outer: previous outer inside next outer, and z covered
    if prev_e.rank == 0:
        om = membership(next_e, prev_c)
        margins.append((-om if math.isfinite(om) else -math.inf, None))
    else:
        margins.append((-containment_margin(next_e, prev_e), None))
    zm = membership(next_e, z)
    margins.append((-zm if math.isfinite(zm) else -math.inf, None))
    outer_ok = min(m for m, _ in margins) >= -tol

    # inner: h_next_inner(u) <= max(h_prev_inner(u), <z,u>) in normalized
    # coordinates
    inner_margins: List[Tuple[float, Optional[np.ndarray]]] = []
    if next_e.rank == 0:
        # a rank-0 next inner is just its center; check it against the hull
        inner_ok = True
    else:
        project, k, z_norm, raised = _normalized_frame(prev_e, prev_c, z)
        c_in = project((next_c - prev_c)[:, None])[:, 0]
        m_in = project(next_e.axes * (next_a * next_e.semiaxes)[None, :])

        def margin_for(dirs: np.ndarray) -> np.ndarray:
            # dirs: (n, k) unit directions in normalized coordinates
            h_next = dirs @ c_in + np.linalg.norm(dirs @ m_in, axis=1)
            if prev_e.rank == 0:
                h_prev = np.zeros(len(dirs))
            elif raised:
                h_prev = prev_a * np.linalg.norm(dirs[:, :k - 1], axis=1)
            else:
                h_prev = prev_a * np.ones(len(dirs))
            allowed = np.maximum(h_prev, dirs @ z_norm)
            return allowed - h_next

        # 2-D slice through the new point's direction
        zn = float(np.linalg.norm(z_norm))
        e1 = z_norm / zn if zn > 1e-12 else np.eye(k)[:, 0]
        if k >= 2:
            # any unit vector orthogonal to e1
            probe = np.eye(k)[:, int(np.argmin(np.abs(e1)))]
            e2 = probe - e1 * np.dot(e1, probe)
            e2 /= np.linalg.norm(e2)
            theta = np.linspace(0.0, 2.0 * math.pi, n_slice, endpoint=False)
            dirs = np.outer(np.cos(theta), e1) + np.outer(np.sin(theta), e2)
        else:
            dirs = np.array([[1.0], [-1.0]]) * e1[None, :] if k == 1 else np.zeros((0, k))
            dirs = dirs.reshape(-1, k)
        slice_margins = margin_for(dirs)
        worst_idx = int(np.argmin(slice_margins))
        inner_margins.append((float(slice_margins[worst_idx]), dirs[worst_idx]))

        # refine the worst slice direction locally
        if k >= 2:
            base = 2.0 * math.pi * worst_idx / n_slice
            fine = base + np.linspace(-2.0 * math.pi / n_slice,
                                      2.0 * math.pi / n_slice, 64)
            dirs_f = np.outer(np.cos(fine), e1) + np.outer(np.sin(fine), e2)
            fm = margin_for(dirs_f)
            j = int(np.argmin(fm))
            inner_margins.append((float(fm[j]), dirs_f[j]))

        # sampled falsifier directions in the full normalized space
        rng = np.random.default_rng(_DIR_SEED)
        dirs_r = rng.standard_normal((n_sample_dirs, k))
        dirs_r /= np.linalg.norm(dirs_r, axis=1, keepdims=True)
        rm = margin_for(dirs_r)
        j = int(np.argmin(rm))
        inner_margins.append((float(rm[j]), dirs_r[j]))

        inner_ok = min(m for m, _ in inner_margins) >= -tol
        margins.extend(inner_margins)

    worst, direction = min(margins, key=lambda p: p[0])
    return StepCertificate(outer_ok=outer_ok, inner_ok=inner_ok,
                           worst_margin=worst,
                           violating_direction=(direction if worst < -tol else None))


# ---------------------------------------------------------------------------
# offline enclosing-ellipsoid baseline


def mvee_khachiyan(points: Sequence[np.ndarray], eps: float = 1e-4,
                   max_iter: int = 100000) -> Ellipsoid:
    """(1+eps)-approximate minimum-volume enclosing ellipsoid.

    Barycentric-coordinate ascent on the lifted moment matrix; degenerate
    point sets are first projected onto their affine span.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or len(pts) < 2:
        raise OracleError("need at least two points")
    if not (0.0 < eps < 0.5):
        raise OracleError("eps must lie in (0, 0.5)")
    mean = pts.mean(axis=0)
    centered = pts - mean
    u_s, s_s, _ = np.linalg.svd(centered.T, full_matrices=False)
    rank = int(np.sum(s_s > 1e-10 * max(1.0, s_s.max())))
    if rank == 0:
        raise OracleError("all points coincide")
    basis = u_s[:, :rank]
    p = centered @ basis  # n x rank coordinates in the affine span
    n, r = p.shape

    q = np.hstack([p, np.ones((n, 1))]).T  # (r+1) x n
    u = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        x = q @ (u[:, None] * q.T)
        m = np.einsum("in,ij,jn->n", q, np.linalg.inv(x), q)
        j = int(np.argmax(m))
        maximum = m[j]
        if maximum <= (1.0 + eps) * (r + 1):
            break
        step = (maximum - r - 1.0) / ((r + 1.0) * (maximum - 1.0))
        u *= (1.0 - step)
        u[j] += step
    c_span = u @ p
    shape = (p.T @ (u[:, None] * p) - np.outer(c_span, c_span)) * r
    evals, evecs = np.linalg.eigh(shape)
    evals = np.maximum(evals, 1e-300)
    semiaxes = np.sqrt(evals)
    axes = basis @ evecs
    center = mean + basis @ c_span
    return Ellipsoid(center, axes, semiaxes)


# ---------------------------------------------------------------------------
# Gram determinants


def gram_log_det(points: Sequence[np.ndarray]) -> float:
    """(1/2) log det(M M^T) for the matrix M whose rows are the points."""
    m = np.atleast_2d(np.asarray(points, dtype=float))
    _, r = np.linalg.qr(m.T)
    diag = np.abs(np.diag(r))
    if np.any(diag < 1e-12 * max(1.0, diag.max() if diag.size else 1.0)):
        raise OracleError("rows are not linearly independent")
    return float(np.sum(np.log(diag)))


# ---------------------------------------------------------------------------
# small-d inradius (facet enumeration + Chebyshev center)


def inradius(points: Sequence[np.ndarray]) -> float:
    """Inradius of the hull of full-dimensional point sets, d <= 3 only."""
    from scipy.optimize import linprog
    from scipy.spatial import ConvexHull

    pts = np.asarray(points, dtype=float)
    d = pts.shape[1]
    if d > 3:
        raise OracleError("inradius oracle is limited to d <= 3")
    hull = ConvexHull(pts)
    a = hull.equations[:, :-1]
    b = -hull.equations[:, -1]
    norms = np.linalg.norm(a, axis=1)
    # maximize r subject to a@x + r*||a_i|| <= b
    cost = np.zeros(d + 1)
    cost[-1] = -1.0
    a_ub = np.hstack([a, norms[:, None]])
    res = linprog(cost, A_ub=a_ub, b_ub=b, bounds=[(None, None)] * d + [(0, None)])
    if not res.success:
        raise OracleError("inradius LP failed")
    return float(res.x[-1])


# ---------------------------------------------------------------------------
# conic through five points (debug-plot self test)


def fit_conic(points: Sequence[np.ndarray]) -> np.ndarray:
    """Coefficients (A, B, C, D, E, F) of the conic through five 2-D points.

    Solves the one-dimensional nullspace of the design matrix; returns a
    unit-norm coefficient vector.
    """
    pts = np.asarray(points, dtype=float)
    if pts.shape != (5, 2):
        raise OracleError("exactly five 2-D points required")
    x, y = pts[:, 0], pts[:, 1]
    design = np.column_stack([x * x, x * y, y * y, x, y, np.ones(5)])
    _, _, vt = np.linalg.svd(design)
    coeff = vt[-1]
    return coeff / np.linalg.norm(coeff)


def conic_residual(coeff: np.ndarray, pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    vals = (coeff[0] * x * x + coeff[1] * x * y + coeff[2] * y * y
            + coeff[3] * x + coeff[4] * y + coeff[5])
    return float(np.abs(vals).max())


# ---------------------------------------------------------------------------
# scalar inequality grids


@dataclass(frozen=True)
class SlackReport:
    claim_id: str
    worst_slack: float
    argmin: Tuple[float, ...]


def _grid_params(grid_density: int):
    gammas = np.geomspace(1e-6, 10.0, grid_density)
    alphas = np.linspace(1e-4, 0.5, grid_density)
    g, al = np.meshgrid(gammas, alphas, indexing="ij")
    g = g.ravel()
    al = al.ravel()
    a = np.exp(g)
    alp = 1.0 / (1.0 / al + 2.0 * g)
    b = 1.0 + (al - alp) / 2.0
    c = -al + alp * a
    return g, al, a, b, c, alp


def _min_report(claim_id: str, slack: np.ndarray,
                args: Sequence[np.ndarray]) -> SlackReport:
    j = int(np.argmin(slack))
    return SlackReport(claim_id, float(slack[j]),
                       tuple(float(arg[j]) for arg in args))


def inequality_suite(grid_density: int = 100) -> List[SlackReport]:
    """Evaluate the scalar inequalities behind the update analysis on
    dense grids; every worst slack should be >= -1e-12.
    """
    if grid_density < 10:
        raise OracleError("grid_density must be at least 10")
    reports: List[SlackReport] = []
    n1 = max(grid_density * grid_density, 10000)

    x = np.linspace(-10.0, 10.0, n1)
    reports.append(_min_report("exp_lower_linear", np.exp(x) - (1.0 + x), [x]))
    x = np.linspace(0.0, 10.0, n1)
    reports.append(_min_report("exp_lower_quadratic",
                               np.exp(x) - (1.0 + x + x * x / 2.0), [x]))
    x = np.linspace(0.0, 4.0 / 3.0, n1)
    reports.append(_min_report("exp_upper_cubic",
                               (1.0 + x + x * x / 2.0 + x ** 3 / 4.0) - np.exp(x), [x]))

    g1 = np.geomspace(1e-6, 10.0, n1)
    lhs = (np.expm1(g1)) ** 2 / (np.exp(2.0 * g1) - (1.0 + g1 / 4.0) ** 2)
    reports.append(_min_report("gamma_ratio_bound", 1.5 * g1 - lhs, [g1]))

    g, al, a, b, c, alp = _grid_params(grid_density)
    args = [g, al]
    harmonic = np.abs(1.0 / alp - (1.0 / al + 2.0 * g)) / (1.0 / al + 2.0 * g)
    reports.append(_min_report("params_harmonic", -harmonic, args))
    reports.append(_min_report("params_pad_floor", b - 1.0, args))
    reports.append(_min_report("params_shift_nonneg", c, args))
    reports.append(_min_report("params_reach_floor", c + alp * a - al, args))
    reports.append(_min_report("pad_axis_bound", 1.0 + g / 4.0 - b, args))
    reports.append(_min_report("pad_below_stretch", a - b, args))
    reports.append(_min_report("stretch_gap",
                               1.0 - (a - 1.0) ** 2 / (a * a - b * b), args))
    reports.append(_min_report("pad_alpha_identity",
                               b * b - (1.0 + al - alp), args))
    reports.append(_min_report("outer_shift_bound",
                               (b * b - 1.0) / (b * b) * (a * a - b * b) - c * c,
                               args))
    ell1 = 1.0 / (c + a)
    ell2sq = 1.0 / (al * al) - ell1 * ell1
    r = (a * a * ell1 * ell1) / (b * b * ell2sq)
    reports.append(_min_report("inner_touch_nonneg",
                               a - alp * a * np.sqrt((1.0 + r) / r), args))
    reports.append(_min_report("inner_main_bound",
                               (al * al / (alp * alp)) * (1.0 - alp)
                               - b * b * (1.0 + alp - 2.0 * al / a), args))

    # constructed updates at the shell distance rho = 2: the new inner
    # body's transverse width never exceeds the previous one, and obeys
    # the tangent-line bound
    alphas = np.linspace(1e-4, 0.5, n1 // 100 + 10)
    width = np.empty_like(alphas)
    tangent = np.empty_like(alphas)
    for i, alpha in enumerate(alphas):
        params = compute_params(solve_gamma(2.0, float(alpha)), float(alpha))
        width[i] = alpha - params.alpha_next * params.b
        tangent[i] = ((2.0 - params.c) * (alpha / 2.0)
                      / math.sqrt(1.0 - (alpha / 2.0) ** 2)
                      - params.alpha_next * params.b)
    reports.append(_min_report("inner_width_bound", width, [alphas]))
    reports.append(_min_report("tangent_width_bound", tangent, [alphas]))
    return reports
