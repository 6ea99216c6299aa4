import numpy as np
import pytest

from conftest import assert_close_upto_sign, gauss_rank
from frontals.corpus import get_curve, get_entry
from frontals.curves import ExprCurve
from frontals.errors import TangentUndeterminedError
from frontals.frontal import (
    TangentEvaluator,
    contact_orders,
    properness_scan,
    unit_tangent,
    wronskian_matrix,
    wronskian_rank,
)
from frontals.linalg import matrix_rank
from frontals.surfaces import normal_map, tangent_map
from frontals.frames import bishop_transport


def curve_2d(name, sources):
    return ExprCurve.from_sources(name, sources, (-1.0, 1.0))


class TestWronskianRank:
    def test_full_rank_columns(self):
        c = get_curve("example22")
        assert wronskian_rank(c, 0.0, 3) == 3

    def test_vanishing_second_column(self):
        c = get_curve("example23")
        assert wronskian_rank(c, 0.0, 2) == 1

    def test_cusp_rank_two(self):
        c = curve_2d("cusp23", ("t^2/2", "t^3/3"))
        # columns (0,0), (1,0), (0,2): rank by inspection
        w = wronskian_matrix(c, 0.0, 3)
        assert w == pytest.approx(np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 2.0]]))
        assert wronskian_rank(c, 0.0, 3) == 2

    def test_rank_matches_elimination_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            rows = int(rng.integers(1, 7))
            cols = int(rng.integers(1, 9))
            m = rng.integers(-3, 4, size=(rows, cols)).astype(float)
            assert matrix_rank(m, 1e-9) == gauss_rank(m, 1e-9)


class TestContactOrders:
    def test_regular_curve(self):
        rep = contact_orders(get_curve("example22"), 0.0)
        assert (rep.a1, rep.a2, rep.frontal_sufficient) == (1, 2, True)
        assert rep.ranks[:3] == (1, 2, 3)

    def test_inflection_curve(self):
        rep = contact_orders(get_curve("example23"), 0.0)
        assert (rep.a1, rep.a2) == (1, 3)

    def test_constant_curve_inconclusive(self):
        c = ExprCurve.from_sources("const", ("1", "2", "3"), (-1.0, 1.0))
        rep = contact_orders(c, 0.0)
        assert rep.a1 is None and rep.a2 is None
        assert not rep.frontal_sufficient
        assert all(r == 0 for r in rep.ranks)

    def test_monomial_pairs(self):
        for a1 in range(1, 6):
            for a2 in range(a1 + 1, 7):
                c = curve_2d(f"m{a1}{a2}", (f"t^{a1}", f"t^{a2}"))
                rep = contact_orders(c, 0.0)
                assert (rep.a1, rep.a2) == (a1, a2), (a1, a2, rep.ranks)

    def test_ranks_nondecreasing(self):
        for cid in ("example22", "example23", "cusp", "example21"):
            rep = contact_orders(get_curve(cid), 0.0)
            assert all(x <= y for x, y in zip(rep.ranks, rep.ranks[1:]))
            if rep.a1 is not None and rep.a2 is not None:
                assert 1 <= rep.a1 < rep.a2


class TestUnitTangent:
    def test_closed_form(self):
        entry = get_entry("example22")
        grid = np.linspace(-1, 1, 41)
        tf = unit_tangent(entry.curve, grid)
        expected = np.array([entry.get("tau").value(t) for t in grid])
        assert_close_upto_sign(tf.tau, expected, 1e-9)
        assert tf.sign_flips == ()

    def test_cusp_limit_direction(self):
        c = get_curve("cusp")
        tf = unit_tangent(c, np.linspace(0.0, 1.0, 11))
        assert tf.tau[0] == pytest.approx((1.0, 0.0))

    def test_straight_line(self):
        tf = unit_tangent(get_curve("line"), np.linspace(-1, 1, 11))
        assert np.abs(tf.tau - np.array([1.0, 0.0, 0.0])).max() == 0.0

    def test_undetermined_at_constant(self):
        c = ExprCurve.from_sources("const", ("1", "2", "3"), (-1.0, 1.0))
        with pytest.raises(TangentUndeterminedError):
            unit_tangent(c, np.array([0.0, 0.5]))

    def test_unit_norm_and_projection_residual(self):
        for cid in ("example22", "cusp", "helix", "r4curve"):
            c = get_curve(cid)
            grid = c.grid(41)
            tf = unit_tangent(c, grid)
            ev = TangentEvaluator(c)
            norms = np.linalg.norm(tf.tau, axis=1)
            assert np.abs(norms - 1.0).max() <= 1e-12
            for i, t in enumerate(grid):
                fp = ev.fprime(t)
                resid = fp - np.dot(fp, tf.tau[i]) * tf.tau[i]
                bound = 1e-8 * max(1.0, np.linalg.norm(fp))
                assert np.linalg.norm(resid) <= bound

    def test_matches_normalized_velocity_at_regular_points(self):
        for cid in ("example22", "helix"):
            c = get_curve(cid)
            grid = c.grid(41)
            tf = unit_tangent(c, grid)
            ev = TangentEvaluator(c)
            for i, t in enumerate(grid):
                fp = ev.fprime(t)
                if np.linalg.norm(fp) > 1e-6:
                    raw = fp / np.linalg.norm(fp)
                    assert_close_upto_sign(tf.tau[i], raw, 1e-10)

    def test_flat_curve_reports_single_flip(self):
        c = get_curve("example21")
        grid = np.linspace(-1, 1, 41)
        tf = unit_tangent(c, grid)
        assert len(tf.sign_flips) == 1
        assert abs(grid[tf.sign_flips[0]]) <= 0.05


class TestPropernessScan:
    def test_tangent_surface_thin_singular_line(self):
        c = get_curve("example22")
        t = np.linspace(-1, 1, 101)
        s = np.linspace(-1, 1, 101)
        tf = unit_tangent(c, t)
        grid = tangent_map(c, tf, t, s)
        rep = properness_scan(grid)
        assert rep.singular_fraction == pytest.approx(1.0 / 101.0)
        assert rep.largest_box_shape == (101, 1)
        assert not rep.has_full_dim_singular_block
        assert rep.proper_estimate

    def test_line_tangent_surface_everywhere_singular(self):
        c = get_curve("line")
        t = np.linspace(-1, 1, 21)
        s = np.linspace(-1, 1, 21)
        tf = unit_tangent(c, t)
        rep = properness_scan(tangent_map(c, tf, t, s))
        assert rep.singular_fraction == 1.0
        assert not rep.proper_estimate

    def test_line_normal_map_regular(self):
        entry = get_entry("line")
        t = np.linspace(-1, 1, 11)
        tf = unit_tangent(entry.curve, t)
        fields = bishop_transport(tf, entry.bishop_seed(t[0]))
        grid = normal_map(entry.curve, fields, t, np.linspace(-1, 1, 7))
        rep = properness_scan(grid)
        assert rep.singular_fraction == 0.0
        assert rep.proper_estimate
