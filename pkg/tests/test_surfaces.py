import math

import numpy as np
import pytest

from frontals.corpus import get_curve, get_entry
from frontals.curves import ExprCurve
from frontals.errors import InflectionError, MathPreconditionError
from frontals.frames import (
    AdaptedFrame,
    adapted_frame,
    bishop_transport,
    invariants,
)
from frontals.frontal import unit_tangent
from frontals.linalg import orthonormal_column_basis, principal_angles
from frontals.surfaces import (
    canal_surface,
    directrix,
    normal_curvature_r4,
    normal_flatness_residual,
    normal_map,
    parallel_of_tangent,
    singular_locus_parallel,
    symplectic_pullback_check,
    tangent_map,
    verify_right_equivalence,
)


def build_frame(entry, grid, **kw):
    seed = entry.frame_seed(grid[0]) if entry.frame_seed else None
    return adapted_frame(entry.curve, grid, nu0=seed, **kw)


def build_bishop(entry, grid):
    from frontals.linalg import orthonormal_completion

    tf = unit_tangent(entry.curve, grid)
    if entry.bishop_seed is not None:
        seeds = entry.bishop_seed(grid[0])
    else:
        seeds = orthonormal_completion(
            [tf.tau[0]], entry.curve.dim, entry.curve.codim
        )
    return bishop_transport(tf, seeds)


class TestTangentMap:
    def test_matches_closed_form_with_derivative_ruling(self):
        entry = get_entry("example22")
        t = np.linspace(-1, 1, 21)
        s = np.linspace(-1, 1, 11)
        tf = unit_tangent(entry.curve, t)
        grid = tangent_map(entry.curve, tf, t, s, ruling="derivative")
        fn = entry.get("tan_derivative_ruling").value
        expected = np.array([[fn(ti, sj) for sj in s] for ti in t])
        assert np.abs(grid.points - expected).max() <= 1e-10

    def test_zero_offset_recovers_curve(self):
        for cid in ("example22", "helix", "cusp"):
            c = get_curve(cid)
            t = c.grid(11)
            tf = unit_tangent(c, t)
            grid = tangent_map(c, tf, t, np.array([0.0]))
            assert np.abs(grid.points[:, 0, :] - c.points(t)).max() <= 1e-14

    def test_inflection_curve_closed_form(self):
        entry = get_entry("example23")
        t = np.linspace(-1, 1, 21)
        s = np.linspace(-1, 1, 11)
        tf = unit_tangent(entry.curve, t)
        grid = tangent_map(entry.curve, tf, t, s, ruling="derivative")
        fn = entry.get("tan_derivative_ruling").value
        expected = np.array([[fn(ti, sj) for sj in s] for ti in t])
        assert np.abs(grid.points - expected).max() <= 1e-10


class TestNormalMap:
    def test_line_identity(self):
        entry = get_entry("line")
        t = np.linspace(-1, 1, 9)
        fields = build_bishop(entry, t)
        u = np.linspace(-1, 1, 5)
        grid = normal_map(entry.curve, fields, t, u)
        for i in range(9):
            for j in range(5):
                for k in range(5):
                    assert grid.points[i, j, k] == pytest.approx(
                        (t[i], u[j], u[k])
                    )
        assert (grid.jac_rank == 3).all()

    def test_circle_point_query(self):
        entry = get_entry("circle")
        t = np.linspace(0.0, 2.0 * math.pi, 33)
        fields = build_bishop(entry, t)
        grid = normal_map(entry.curve, fields, t,
                          [np.array([0.0, 0.3]), np.array([0.0])])
        assert grid.points[0, 1, 0] == pytest.approx((1.3, 0.0, 0.0))

    def test_zero_offset_recovers_curve(self):
        entry = get_entry("example22")
        t = np.linspace(-1, 1, 9)
        fields = build_bishop(entry, t)
        grid = normal_map(entry.curve, fields, t, np.array([0.0]))
        assert np.abs(
            grid.points[:, 0, 0, :] - entry.curve.points(t)
        ).max() <= 1e-14


class TestCanalSurface:
    def test_torus_point(self):
        entry = get_entry("circle")
        t = np.linspace(0.0, 2.0 * math.pi, 65)
        fields = build_bishop(entry, t)
        theta = np.linspace(0.0, 2.0 * math.pi, 33)
        grid = canal_surface(entry.curve, fields, 0.3, t, theta)
        assert grid.points[0, 0] == pytest.approx((1.3, 0.0, 0.0))

    def test_cylinder_distance(self):
        entry = get_entry("line")
        t = np.linspace(-1, 1, 21)
        fields = build_bishop(entry, t)
        theta = np.linspace(0.0, 2.0 * math.pi, 17)
        grid = canal_surface(entry.curve, fields, 1.0, t, theta)
        axis_dist = np.linalg.norm(grid.points[..., 1:], axis=-1)
        assert np.abs(axis_dist - 1.0).max() <= 1e-12

    def test_distance_to_curve_is_radius(self):
        entry = get_entry("helix")
        t = np.linspace(0.0, 2.0 * math.pi, 41)
        fields = build_bishop(entry, t)
        theta = np.linspace(0.0, 2.0 * math.pi, 17)
        grid = canal_surface(entry.curve, fields, 0.25, t, theta)
        dist = np.linalg.norm(
            grid.points - entry.curve.points(t)[:, None, :], axis=-1
        )
        assert np.abs(dist - 0.25).max() <= 1e-12

    def test_rejects_plane_curves(self):
        entry = get_entry("cusp")
        t = np.linspace(0.1, 1, 11)
        tf = unit_tangent(entry.curve, t)
        nu0 = np.array([[-tf.tau[0][1], tf.tau[0][0]]])
        fields = bishop_transport(tf, nu0)
        with pytest.raises(MathPreconditionError):
            canal_surface(entry.curve, fields, 0.1, t,
                          np.linspace(0, 2 * math.pi, 9))


class TestParallelOfTangent:
    def test_closed_form_with_derivative_ruling(self):
        entry = get_entry("example22")
        t = np.linspace(-1, 1, 41)
        s = np.linspace(-1, 1, 11)
        frame = build_frame(entry, t)
        grid = parallel_of_tangent(entry.curve, frame, [0.5], t, s,
                                   ruling="derivative")
        fn = entry.get("pal_derivative_ruling").value
        expected = np.array([[fn(ti, sj, 0.5) for sj in s] for ti in t])
        assert np.abs(grid.points - expected).max() <= 1e-9

    def test_zero_offset_equals_tangent_map(self):
        entry = get_entry("example22")
        t = np.linspace(-1, 1, 21)
        s = np.linspace(-1, 1, 11)
        frame = build_frame(entry, t)
        tf = unit_tangent(entry.curve, t)
        pal = parallel_of_tangent(entry.curve, frame, [0.0], t, s)
        tan = tangent_map(entry.curve, tf, t, s)
        assert np.abs(pal.points - tan.points).max() <= 1e-14
        assert (pal.jac_rank == tan.jac_rank).all()

    def test_singular_nodes_cluster_on_offset_line(self):
        # kappa = ell here, so s kappa - u ell = 0 exactly at s = u
        entry = get_entry("example22")
        t = np.linspace(-1, 1, 41)
        s = np.linspace(-1, 1, 41)  # contains 0.5 exactly
        frame = build_frame(entry, t)
        pal = parallel_of_tangent(entry.curve, frame, [0.5], t, s)
        sing = np.argwhere(pal.singular_flag)
        assert len(sing) == 41
        assert all(s[j] == pytest.approx(0.5, abs=1e-12) for _, j in sing)


class TestSingularLocus:
    def test_constant_locus_when_kappa_equals_ell(self):
        entry = get_entry("example22")
        t = np.linspace(-1, 1, 101)
        frame = build_frame(entry, t)
        prof = invariants(entry.curve, frame)
        locus = singular_locus_parallel(prof, [0.5])
        assert np.abs(locus.s - 0.5).max() <= 1e-9
        assert locus.residuals.max() <= 1e-8

    def test_zero_offset_gives_cuspidal_edge(self):
        entry = get_entry("example22")
        t = np.linspace(-1, 1, 51)
        frame = build_frame(entry, t)
        prof = invariants(entry.curve, frame)
        locus = singular_locus_parallel(prof, [0.0])
        assert np.abs(locus.s).max() == 0.0

    def test_divergence_near_inflection(self):
        # |s(t)/u| frozen from the torsion/curvature ratio 864 a^3/(|t| D^3)
        entry = get_entry("example23")
        grid = np.array([1e-3, 1e-2, 0.1, 0.5, 1.0])
        frame = adapted_frame(entry.curve, grid, inflection_rel_tol=1e-9)
        prof = invariants(entry.curve, frame)
        locus = singular_locus_parallel(prof, [0.5])
        ratio = np.abs(locus.s) / 0.5
        assert ratio[0] == pytest.approx(
            entry.get("locus_ratio@1e-3").value, rel=1e-6
        )
        assert ratio[1] == pytest.approx(
            entry.get("locus_ratio@1e-2").value, rel=1e-6
        )

    def test_inflection_in_range_rejected(self):
        entry = get_entry("example22")
        t = np.linspace(-1, 1, 21)
        frame = build_frame(entry, t)
        prof = invariants(entry.curve, frame)
        prof.kappa[3] = 0.0
        with pytest.raises(InflectionError):
            singular_locus_parallel(prof, [0.5])

    def test_matches_bisection_on_sampled_jacobian(self):
        # independent route: bisect the signed degeneracy indicator of the
        # sampled parallel's Jacobian along s for a few fixed t
        entry = get_entry("example22")
        t_grid = np.linspace(-1, 1, 41)
        frame = build_frame(entry, t_grid)
        prof = invariants(entry.curve, frame)
        locus = singular_locus_parallel(prof, [0.3])
        curve = entry.curve
        from frontals.frames import TangentEvaluator, _mu_jets

        ev = TangentEvaluator(curve)

        def indicator(i, s):
            t = t_grid[i]
            tau, tau_p = ev.tau_and_prime(t, frame.tau[i])
            mu, mu_p, _ = _mu_jets(ev, t, frame.tau[i])
            nu = frame.nus[0, i]
            nup = -float(np.dot(nu, mu_p)) * mu
            jt = ev.fprime(t) + s * tau_p + 0.3 * nup
            return float(np.dot(np.cross(jt, tau), np.cross(mu, tau)))

        spacing = t_grid[1] - t_grid[0]
        for i in (0, 10, 25, 40):
            lo, hi = -1.0, 1.0
            flo = indicator(i, lo)
            assert flo * indicator(i, hi) < 0
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if flo * indicator(i, mid) <= 0:
                    hi = mid
                else:
                    lo, flo = mid, indicator(i, mid)
            assert abs(0.5 * (lo + hi) - locus.s[i]) <= 2 * spacing


class TestDirectrix:
    def test_closed_form(self):
        entry = get_entry("example22")
        t = np.linspace(-1, 1, 201)
        frame = build_frame(entry, t)
        prof = invariants(entry.curve, frame)
        for u in (0.1, 0.5, -0.7):
            d = directrix(entry.curve, frame, prof, [u])
            fn = entry.get("directrix").value
            expected = np.array([fn(ti, u) for ti in t])
            assert np.abs(d.points - expected).max() <= 1e-6

    def test_zero_offset_is_curve(self):
        entry = get_entry("example22")
        t = np.linspace(-1, 1, 51)
        frame = build_frame(entry, t)
        prof = invariants(entry.curve, frame)
        d = directrix(entry.curve, frame, prof, [0.0])
        assert np.abs(d.points - entry.curve.points(t)).max() <= 1e-14

    def test_inconsistent_profile_rejected(self):
        # corrupting the torsion profile breaks g' parallel tau by O(1),
        # far above the stencil's truncation floor
        entry = get_entry("example22")
        t = np.linspace(-1, 1, 101)
        frame = build_frame(entry, t)
        prof = invariants(entry.curve, frame)
        prof.ells[0] = prof.ells[0] + 0.3 * np.sin(5.0 * t)
        with pytest.raises(MathPreconditionError, match="tangency"):
            directrix(entry.curve, frame, prof, [0.5])

    def test_not_a_parallel_curve_for_nonzero_offset(self):
        # a parallel curve differs from f by a constant combination of
        # curve-normal parallel fields; the directrix does not
        entry = get_entry("example22")
        t = np.linspace(-1, 1, 101)
        frame = build_frame(entry, t)
        prof = invariants(entry.curve, frame)
        fields = build_bishop(entry, t)

        def best_constant_offset_residual(u):
            d = directrix(entry.curve, frame, prof, [u])
            disp = d.points - entry.curve.points(t)
            coeffs = [np.mean(np.sum(disp * fields.vectors[i], axis=1))
                      for i in range(2)]
            model = sum(c * fields.vectors[i] for i, c in enumerate(coeffs))
            return np.linalg.norm(disp - model, axis=1)

        assert best_constant_offset_residual(0.0).max() <= 1e-9
        assert best_constant_offset_residual(0.5).min() > 1e-3


class TestRightEquivalence:
    def test_example22(self):
        entry = get_entry("example22")
        t = np.linspace(-1, 1, 201)
        s = np.linspace(-1, 1, 101)
        frame = build_frame(entry, t)
        prof = invariants(entry.curve, frame)
        pal = parallel_of_tangent(entry.curve, frame, [0.5], t, s)
        d = directrix(entry.curve, frame, prof, [0.5])
        report = verify_right_equivalence(pal, d, frame, prof)
        assert report.residual <= 1e-6

    def test_zero_offset_identical_maps(self):
        entry = get_entry("example22")
        t = np.linspace(-1, 1, 51)
        s = np.linspace(-1, 1, 21)
        frame = build_frame(entry, t)
        prof = invariants(entry.curve, frame)
        pal = parallel_of_tangent(entry.curve, frame, [0.0], t, s)
        d = directrix(entry.curve, frame, prof, [0.0])
        report = verify_right_equivalence(pal, d, frame, prof)
        assert report.residual <= 1e-12

    def test_generic_space_curve(self):
        entry = get_entry("helix")
        t = np.linspace(0.0, 2.0 * math.pi, 201)
        s = np.linspace(-1, 1, 31)
        frame = build_frame(entry, t)
        prof = invariants(entry.curve, frame)
        pal = parallel_of_tangent(entry.curve, frame, [0.3], t, s)
        d = directrix(entry.curve, frame, prof, [0.3])
        report = verify_right_equivalence(pal, d, frame, prof)
        assert report.residual <= 1e-5

    def test_residual_at_least_halves_with_spacing(self):
        entry = get_entry("example22")
        s = np.linspace(-1, 1, 21)

        def residual(n):
            t = np.linspace(-1, 1, n)
            frame = build_frame(entry, t)
            prof = invariants(entry.curve, frame)
            pal = parallel_of_tangent(entry.curve, frame, [0.5], t, s)
            d = directrix(entry.curve, frame, prof, [0.5])
            return verify_right_equivalence(pal, d, frame, prof).residual

        coarse, fine = residual(101), residual(201)
        assert fine <= coarse / 2.0

    def test_rejects_derivative_ruling(self):
        entry = get_entry("example22")
        t = np.linspace(-1, 1, 21)
        s = np.linspace(-1, 1, 11)
        frame = build_frame(entry, t)
        prof = invariants(entry.curve, frame)
        pal = parallel_of_tangent(entry.curve, frame, [0.5], t, s,
                                  ruling="derivative")
        d = directrix(entry.curve, frame, prof, [0.5])
        with pytest.raises(MathPreconditionError):
            verify_right_equivalence(pal, d, frame, prof)


class TestSymplecticPullback:
    def test_example22(self):
        entry = get_entry("example22")
        fields = build_bishop(entry, np.linspace(-1, 1, 201))
        report = symplectic_pullback_check(entry.curve, fields)
        assert report.max_entry <= 1e-6

    def test_line_near_machine_precision(self):
        entry = get_entry("line")
        fields = build_bishop(entry, np.linspace(-1, 1, 51))
        report = symplectic_pullback_check(entry.curve, fields)
        assert report.max_entry <= 1e-12

    def test_circle(self):
        entry = get_entry("circle")
        fields = build_bishop(entry, np.linspace(0, 2 * math.pi, 201))
        report = symplectic_pullback_check(entry.curve, fields)
        assert report.max_entry <= 1e-6


class TestNormalFlatnessOfTangentSurface:
    def test_r4_curve(self):
        entry = get_entry("r4curve")
        t = np.arange(-1.0, 1.0 + 1e-12, 1e-3)
        frame = build_frame(entry, t)
        s = np.array([-1.0, -0.5, 0.25, 0.75, 1.0])
        report = normal_flatness_residual(entry.curve, frame, s)
        assert not report.vacuous
        assert report.max_residual <= 1e-5

    def test_hypersurface_case(self):
        entry = get_entry("example22")
        t = np.arange(-1.0, 1.0 + 1e-12, 1e-3)
        frame = build_frame(entry, t)
        s = np.array([-0.75, 0.4, 1.0])
        report = normal_flatness_residual(entry.curve, frame, s)
        assert report.max_residual <= 1e-6

    def test_straight_line_vacuous(self):
        c = get_curve("line")
        t = np.linspace(-1, 1, 101)
        tau = np.tile([1.0, 0.0, 0.0], (101, 1))
        frame = AdaptedFrame(
            curve=c, grid=t, tau=tau,
            mu=np.tile([0.0, 1.0, 0.0], (101, 1)),
            kappa=np.zeros(101),
            nus=np.tile([0.0, 0.0, 1.0], (1, 101, 1)).reshape(1, 101, 3),
            gram_drift_max=0.0,
        )
        report = normal_flatness_residual(c, frame, np.linspace(-1, 1, 5))
        assert report.vacuous


class TestTangentPlaneGeometry:
    def test_plane_constant_along_rulings(self):
        entry = get_entry("example22")
        t = np.linspace(-1, 1, 21)
        frame_t = unit_tangent(entry.curve, t)
        from frontals.frames import TangentEvaluator

        ev = TangentEvaluator(entry.curve)
        for i in (3, 10, 17):
            ti = t[i]
            tau, tau_p = ev.tau_and_prime(ti, frame_t.tau[i])
            fp = ev.fprime(ti)

            def plane(s):
                return np.stack([fp + s * tau_p, tau], axis=1)

            base = plane(0.4)
            for lam in (0.5, 2.0, -1.0):
                angles = principal_angles(base, plane(0.4 * lam))
                assert angles.max() <= 1e-5

    def test_curve_tangent_inside_surface_tangent(self):
        entry = get_entry("example22")
        t = np.linspace(-1, 1, 21)
        s = np.linspace(-1, 1, 21)
        tf = unit_tangent(entry.curve, t)
        from frontals.frames import TangentEvaluator

        ev = TangentEvaluator(entry.curve)
        s_adj = s[np.argsort(np.abs(s))[1]]  # smallest nonzero offset
        for i in (0, 7, 14, 20):
            ti = t[i]
            tau, tau_p = ev.tau_and_prime(ti, tf.tau[i])
            jac = np.stack([ev.fprime(ti) + s_adj * tau_p, tau], axis=1)
            q = orthonormal_column_basis(jac)
            resid = tau - q @ (q.T @ tau)
            assert np.linalg.norm(resid) <= 1e-6

    @pytest.mark.parametrize("a1,a2", [(1, 2), (1, 3), (2, 3)])
    def test_monomial_singular_sets(self, a1, a2):
        c = ExprCurve.from_sources(
            f"mono{a1}{a2}", (f"t^{a1}", f"t^{a2}"), (-1.0, 1.0)
        )
        t = np.linspace(-1, 1, 41)
        s = np.linspace(-1, 1, 41)
        tf = unit_tangent(c, t)
        grid = tangent_map(c, tf, t, s)
        expected = np.zeros((41, 41), dtype=bool)
        expected[:, s == 0.0] = True
        if a2 - a1 - 1 >= 1:
            expected[t == 0.0, :] = True
        assert (grid.singular_flag == expected).all()


class TestNormalCurvature:
    def test_flat_plane(self):
        def surf(s, t):
            return np.array([s, t, 0.0, 0.0])

        field = normal_curvature_r4(
            surf,
            lambda s, t: np.array([0.0, 0.0, 1.0, 0.0]),
            lambda s, t: np.array([0.0, 0.0, 0.0, 1.0]),
            np.linspace(-0.5, 0.5, 9), np.linspace(-0.5, 0.5, 9),
        )
        assert field.max_abs <= 1e-12

    def test_torus_embedded_in_hyperplane(self):
        big, small = 2.0, 0.5

        def surf(u, v):
            return np.array([
                (big + small * math.cos(v)) * math.cos(u),
                (big + small * math.cos(v)) * math.sin(u),
                small * math.sin(v),
                0.0,
            ])

        def e3(u, v):
            return np.array([
                math.cos(v) * math.cos(u), math.cos(v) * math.sin(u),
                math.sin(v), 0.0,
            ])

        def e4(u, v):
            return np.array([0.0, 0.0, 0.0, 1.0])

        field = normal_curvature_r4(
            surf, e3, e4,
            np.linspace(0.0, 2.0 * math.pi, 17),
            np.linspace(0.0, 2.0 * math.pi, 17),
        )
        assert field.max_abs <= 1e-5

    def test_graph_surface_regression_value(self):
        # |K(0,0)| = 8.0, frozen from an independent partial-derivative
        # discretization of the connection form on a 1e-3 grid
        def surf(s, t):
            return np.array([s, t, s * s - t * t, 2 * s * t])

        def tangent_q(s, t):
            fs = np.array([1.0, 0.0, 2 * s, 2 * t])
            ft = np.array([0.0, 1.0, -2 * t, 2 * s])
            return np.linalg.qr(np.stack([fs, ft], axis=1))[0]

        def e3(s, t):
            q = tangent_q(s, t)
            v = np.array([0.0, 0.0, 1.0, 0.0])
            v = v - q @ (q.T @ v)
            return v / np.linalg.norm(v)

        def e4(s, t):
            q = tangent_q(s, t)
            v = np.array([0.0, 0.0, 0.0, 1.0])
            v = v - q @ (q.T @ v)
            w = e3(s, t)
            v = v - (v @ w) * w
            return v / np.linalg.norm(v)

        grid = np.linspace(-0.02, 0.02, 5)
        field = normal_curvature_r4(surf, e3, e4, grid, grid)
        center = field.values[1:3, 1:3]
        assert np.isfinite(center).all()
        value = float(np.abs(center).max())
        assert value >= 0.1
        assert value == pytest.approx(8.0, rel=0.05)

    def test_rejects_non_normal_frame(self):
        def surf(s, t):
            return np.array([s, t, 0.0, 0.0])

        with pytest.raises(MathPreconditionError):
            normal_curvature_r4(
                surf,
                lambda s, t: np.array([1.0, 0.0, 0.0, 0.0]),
                lambda s, t: np.array([0.0, 0.0, 0.0, 1.0]),
                np.linspace(-0.5, 0.5, 5), np.linspace(-0.5, 0.5, 5),
            )
