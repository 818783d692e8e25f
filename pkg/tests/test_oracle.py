import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellipstream.ellipsoid import Ellipsoid, ScaledEllipsoid
from ellipstream.oracle import (
    HullSpec,
    OracleError,
    union_hull_distance,
    check_monotone_step,
    conic_residual,
    fit_conic,
    gram_log_det,
    hull_membership,
    inequality_suite,
    inradius,
    mvee_khachiyan,
)
from ellipstream.state import RoundingState
from ellipstream.update_rule import full_update, irregular_update

SQUARE = [np.array(p) for p in
          [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]]


class TestHullMembership:
    def test_interior(self):
        assert hull_membership(SQUARE, np.array([0.3, -0.2]))

    def test_vertex(self):
        assert hull_membership(SQUARE, np.array([1.0, 1.0]))

    def test_edge_midpoint(self):
        assert hull_membership(SQUARE, np.array([1.0, 0.0]))

    def test_outside(self):
        assert not hull_membership(SQUARE, np.array([1.2, 0.0]))

    def test_single_point_hull(self):
        assert hull_membership([np.array([2.0, 3.0])], np.array([2.0, 3.0]))
        assert not hull_membership([np.array([2.0, 3.0])], np.array([2.0, 3.1]))

    def test_large_coordinates(self):
        pts = [p * 1e6 for p in SQUARE]
        assert hull_membership(pts, np.array([9.9e5, 0.0]))
        assert not hull_membership(pts, np.array([1.1e6, 0.0]))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_convex_combination_always_inside(self, seed):
        rng = np.random.default_rng(seed)
        pts = [rng.standard_normal(3) for _ in range(6)]
        w = rng.random(6)
        w /= w.sum()
        x = sum(wi * p for wi, p in zip(w, pts))
        assert hull_membership(pts, x)


class TestUnionHullDistance:
    def test_interior_and_boundary_of_square(self):
        h = HullSpec(point_list=tuple(SQUARE))
        assert union_hull_distance(h, np.array([0.2, 0.3])) <= 1e-9
        assert union_hull_distance(h, np.array([1.0, 0.0])) <= 1e-9

    def test_exterior_distance(self):
        h = HullSpec(point_list=tuple(SQUARE))
        assert union_hull_distance(h, np.array([2.0, 0.0])) == pytest.approx(
            1.0, abs=1e-8)

    def test_ball_and_point_union(self):
        ball = ScaledEllipsoid(Ellipsoid.ball(np.zeros(2), 1.0), 1.0)
        h = HullSpec(point_list=(np.array([3.0, 0.0]),),
                     ellipsoid_list=(ball,))
        # the cone from the point tangent to the ball covers this one
        assert union_hull_distance(h, np.array([1.5, 0.4])) <= 1e-9
        assert union_hull_distance(h, np.array([0.0, 1.5])) == pytest.approx(
            0.5, abs=1e-8)

    def test_agrees_with_lp_membership(self):
        rng = np.random.default_rng(52)
        pts = tuple(rng.standard_normal(3) for _ in range(8))
        h = HullSpec(point_list=pts)
        for _ in range(20):
            q = rng.standard_normal(3) * 0.8
            lp = hull_membership(pts, q)
            fw = union_hull_distance(h, q) <= 1e-7
            assert lp == fw


class TestCheckMonotoneStep:
    def make_state(self, d=2, alpha=0.5):
        return RoundingState(Ellipsoid.ball(np.zeros(d), 1.0), alpha=alpha)

    def test_valid_regular_step(self):
        prev = self.make_state()
        z = np.array([2.5, 0.4])
        nxt = full_update(prev, z)
        cert = check_monotone_step(prev, nxt, z)
        assert cert.outer_ok and cert.inner_ok
        assert cert.worst_margin >= -1e-9

    def test_valid_irregular_step(self):
        body = Ellipsoid(np.zeros(3), np.eye(3)[:, :2], np.array([1.0, 1.0]))
        prev = RoundingState(body, alpha=0.5)
        z = np.array([0.2, -0.1, 1.5])
        nxt = irregular_update(prev, z)
        cert = check_monotone_step(prev, nxt, z)
        assert cert.outer_ok and cert.inner_ok

    def test_outer_shrink_detected(self):
        prev = self.make_state()
        z = np.array([2.5, 0.0])
        nxt = full_update(prev, z)
        bad = RoundingState(
            Ellipsoid(nxt.center, nxt.ellipsoid.axes,
                      nxt.ellipsoid.semiaxes * 0.4), nxt.alpha)
        cert = check_monotone_step(prev, bad, z)
        assert not cert.outer_ok

    def test_missed_point_detected(self):
        prev = self.make_state()
        z = np.array([4.0, 0.0])
        nxt = full_update(prev, z)
        cert = check_monotone_step(prev, nxt, np.array([10.0, 0.0]))
        assert not cert.outer_ok

    def test_overgrown_inner_detected(self):
        prev = self.make_state()
        z = np.array([2.5, 0.0])
        nxt = full_update(prev, z)
        bad = RoundingState(nxt.ellipsoid, alpha=0.95)
        cert = check_monotone_step(prev, bad, z)
        assert not cert.inner_ok
        assert cert.worst_margin < 0

    def test_certificate_serializes(self):
        prev = self.make_state()
        z = np.array([2.0, 1.0])
        cert = check_monotone_step(prev, full_update(prev, z), z)
        payload = cert.to_json()
        assert '"outer_ok": true' in payload

    def test_tuple_inputs_accepted(self):
        prev = self.make_state()
        z = np.array([2.5, 0.0])
        nxt = full_update(prev, z)
        cert = check_monotone_step(
            (prev.center, prev.ellipsoid, prev.alpha),
            (nxt.center, nxt.ellipsoid, nxt.alpha), z)
        assert cert.outer_ok and cert.inner_ok


class TestMvee:
    def test_square_gives_circumscribed_circle(self):
        e = mvee_khachiyan(SQUARE, eps=1e-8)
        assert np.allclose(e.center, 0.0, atol=1e-6)
        assert np.allclose(e.semiaxes, math.sqrt(2.0), atol=1e-5)

    def test_segment_in_the_plane(self):
        pts = [np.array([-1.0, 0.0]), np.array([1.0, 0.0])]
        e = mvee_khachiyan(pts, eps=1e-8)
        assert e.rank == 1
        assert e.semiaxes[0] == pytest.approx(1.0, abs=1e-5)

    def test_all_points_covered(self):
        rng = np.random.default_rng(50)
        pts = [rng.standard_normal(4) for _ in range(40)]
        e = mvee_khachiyan(pts, eps=1e-6)
        from ellipstream.ellipsoid import membership
        assert max(membership(e, p) for p in pts) <= 1e-4

    def test_anisotropic_cloud(self):
        rng = np.random.default_rng(51)
        pts = [rng.standard_normal(2) * np.array([10.0, 0.1])
               for _ in range(60)]
        e = mvee_khachiyan(pts, eps=1e-7)
        assert e.semiaxes[0] / e.semiaxes[1] > 20.0


class TestSmallHelpers:
    def test_gram_log_det(self):
        v = [np.array([3.0, 0.0]), np.array([0.0, 2.0])]
        assert gram_log_det(v) == pytest.approx(math.log(6.0))

    def test_gram_log_det_dependent_rows(self):
        v = [np.array([1.0, 0.0]), np.array([2.0, 0.0])]
        with pytest.raises(OracleError, match="independent"):
            gram_log_det(v)

    def test_inradius_right_triangle(self):
        tri = [np.array([0.0, 0.0]), np.array([1.0, 0.0]),
               np.array([0.0, 1.0])]
        assert inradius(tri) == pytest.approx((2.0 - math.sqrt(2.0)) / 2.0,
                                              abs=1e-8)

    def test_inradius_square(self):
        assert inradius(SQUARE) == pytest.approx(1.0, abs=1e-8)

    def test_fit_conic_recovers_circle(self):
        ang = np.linspace(0.0, 2.0 * math.pi, 6)[:5]
        pts = [np.array([2.0 * math.cos(a), 2.0 * math.sin(a)]) for a in ang]
        coeff = fit_conic(pts)
        assert conic_residual(coeff, np.asarray(pts)) < 1e-12
        off = np.array([[3.0, 0.0]])
        assert conic_residual(coeff, off) > 1e-3


class TestInequalitySuite:
    def test_all_slacks_nonnegative(self):
        for report in inequality_suite():
            assert report.worst_slack >= -1e-12, report.claim_id

    def test_expected_claims_present(self):
        ids = {r.claim_id for r in inequality_suite()}
        assert "exp_lower_linear" in ids
        assert "inner_main_bound" in ids
        assert "gamma_ratio_bound" in ids
