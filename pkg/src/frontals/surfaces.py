"""Ruled maps over a curve and their verification checks.

Builds sampled tangent developables, normal maps, canal (tube) surfaces
and parallels of the tangent developable, annotates each grid node with
its numeric Jacobian rank, and derives the singular locus of a parallel
and its edge of regression (directrix) together with the
right-equivalence between the two.

Ruling convention: the tangent-type maps accept ``ruling="unit"`` (the
chained unit tangent; default) or ``ruling="derivative"`` (the raw
velocity f'). The two parametrizations differ by the source
diffeomorphism (t, s) -> (t, s |f'|) wherever f' does not vanish, so
rank profiles agree there; across singular points of the curve only the
unit ruling extends smoothly, and all rank/locus semantics in this
module are stated for it. The derivative ruling exists because worked
closed forms for graph-like curves are usually written that way.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import Curve
from .errors import InflectionError, MathPreconditionError
from .frames import (
    AdaptedFrame,
    InvariantProfile,
    ParallelFields,
    TangentEvaluator,
    _mu_jets,
    surface_normal_transport,
)
from .frontal import TangentField
from .linalg import DEFAULT_RANK_TOL, batched_rank, orthonormal_column_basis

RULINGS = ("unit", "derivative")


@dataclass
class SurfaceGrid:
    """A sampled ruled map with per-node Jacobian rank annotations.

    ``axes`` is a tuple of (name, samples) pairs; ``points`` has shape
    grid_shape + (ambient_dim,) and ``jac_rank`` has shape grid_shape. A
    node is singular when its rank drops below the domain dimension.
    """

    map_kind: str
    axes: tuple
    points: np.ndarray
    jac_rank: np.ndarray
    ruling: str = "n/a"

    def __post_init__(self):
        shape = tuple(len(samples) for _, samples in self.axes)
        if self.points.shape[:-1] != shape or self.jac_rank.shape != shape:
            raise ValueError("surface grid shape mismatch")

    @property
    def domain_dim(self) -> int:
        return len(self.axes)

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[-1]

    @property
    def singular_flag(self) -> np.ndarray:
        return self.jac_rank < self.domain_dim


def _check_grid_match(grid_a, grid_b, what: str):
    if len(grid_a) != len(grid_b) or not np.array_equal(
        np.asarray(grid_a, dtype=float), np.asarray(grid_b, dtype=float)
    ):
        raise ValueError(f"{what} must share the frame's parameter grid")


def _ruling_fields(curve, tau_samples, t_grid, ruling):
    """Per-sample ruling vectors and their t-derivatives."""
    if ruling not in RULINGS:
        raise ValueError(f"ruling must be one of {RULINGS}")
    ev = TangentEvaluator(curve)
    n, d = len(t_grid), curve.dim
    r = np.empty((n, d))
    rp = np.empty((n, d))
    fp = np.empty((n, d))
    pts = np.empty((n, d))
    for i, t in enumerate(t_grid):
        pts[i] = curve.point(t)
        fp[i] = ev.fprime(t)
        if ruling == "unit":
            r[i], rp[i] = ev.tau_and_prime(t, tau_samples[i])
        else:
            r[i] = fp[i]
            rp[i] = ev.fsecond(t)
    return pts, fp, r, rp


def tangent_map(curve: Curve, frame: TangentField, t_grid, s_grid,
                ruling: str = "unit",
                rank_tol: float = DEFAULT_RANK_TOL) -> SurfaceGrid:
    """Sample (t, s) -> f(t) + s r(t) with per-node Jacobian ranks."""
    t_grid = np.asarray(t_grid, dtype=float)
    s_grid = np.asarray(s_grid, dtype=float)
    _check_grid_match(t_grid, frame.grid, "tangent map t-grid")
    pts, fp, r, rp = _ruling_fields(curve, frame.tau, t_grid, ruling)
    points = pts[:, None, :] + s_grid[None, :, None] * r[:, None, :]
    jt = fp[:, None, :] + s_grid[None, :, None] * rp[:, None, :]
    js = np.broadcast_to(r[:, None, :], jt.shape)
    jac = np.stack([jt, js], axis=-1)
    ranks = batched_rank(jac, rank_tol)
    return SurfaceGrid(
        map_kind="Tan", axes=(("t", t_grid), ("s", s_grid)),
        points=points, jac_rank=ranks, ruling=ruling,
    )


def normal_map(curve: Curve, fields: ParallelFields, t_grid, u_grid,
               rank_tol: float = DEFAULT_RANK_TOL) -> SurfaceGrid:
    """Sample the full normal map (t, u_1..u_p) -> f(t) + sum u_i nu_i(t).

    ``u_grid`` is either one sample array reused for every normal
    direction or a sequence of p arrays.
    """
    if fields.mode != "curve_normal":
        raise ValueError("normal map needs curve-normal parallel fields")
    t_grid = np.asarray(t_grid, dtype=float)
    _check_grid_match(t_grid, fields.grid, "normal map t-grid")
    p = fields.n_fields
    u_grid = list(u_grid) if isinstance(u_grid, (list, tuple)) else [u_grid] * p
    if len(u_grid) != p:
        raise ValueError(f"expected {p} offset sample arrays")
    u_axes = [np.asarray(u, dtype=float) for u in u_grid]

    ev = TangentEvaluator(curve)
    n, d = len(t_grid), curve.dim
    pts = np.array([curve.point(t) for t in t_grid])
    fp = np.array([ev.fprime(t) for t in t_grid])
    nu = fields.vectors  # (p, n, d)
    nup = np.array([fields.field_derivatives(i) for i in range(p)])

    shape = (n,) + tuple(len(u) for u in u_axes)
    mesh = np.meshgrid(*u_axes, indexing="ij")  # p arrays of shape shape[1:]
    points = np.broadcast_to(
        pts.reshape((n,) + (1,) * p + (d,)), shape + (d,)
    ).copy()
    jt = np.broadcast_to(
        fp.reshape((n,) + (1,) * p + (d,)), shape + (d,)
    ).copy()
    for i in range(p):
        ui = mesh[i][None, ..., None]
        points += ui * nu[i].reshape((n,) + (1,) * p + (d,))
        jt += ui * nup[i].reshape((n,) + (1,) * p + (d,))
    cols = [jt] + [
        np.broadcast_to(nu[i].reshape((n,) + (1,) * p + (d,)), shape + (d,))
        for i in range(p)
    ]
    jac = np.stack(cols, axis=-1)
    ranks = batched_rank(jac, rank_tol)
    axes = (("t", t_grid),) + tuple(
        (f"u{i + 1}", u_axes[i]) for i in range(p)
    )
    return SurfaceGrid(map_kind="Nor", axes=axes, points=points,
                       jac_rank=ranks)


def canal_surface(curve: Curve, fields: ParallelFields, r: float, t_grid,
                  angle_grid,
                  rank_tol: float = DEFAULT_RANK_TOL) -> SurfaceGrid:
    """Tube of radius r: the normal map restricted to |nu| = r (p = 2)."""
    if r <= 0:
        raise ValueError("canal radius must be positive")
    if fields.mode != "curve_normal" or fields.n_fields != 2:
        raise MathPreconditionError(
            "canal sampling is implemented for tubes: two curve-normal "
            "parallel fields (curve in R^3)"
        )
    t_grid = np.asarray(t_grid, dtype=float)
    angle_grid = np.asarray(angle_grid, dtype=float)
    _check_grid_match(t_grid, fields.grid, "canal t-grid")
    ev = TangentEvaluator(curve)
    pts = np.array([curve.point(t) for t in t_grid])
    fp = np.array([ev.fprime(t) for t in t_grid])
    nu1, nu2 = fields.vectors
    nu1p = fields.field_derivatives(0)
    nu2p = fields.field_derivatives(1)
    c = np.cos(angle_grid)[None, :, None]
    s = np.sin(angle_grid)[None, :, None]
    points = pts[:, None, :] + r * (c * nu1[:, None, :] + s * nu2[:, None, :])
    jt = fp[:, None, :] + r * (c * nu1p[:, None, :] + s * nu2p[:, None, :])
    jang = r * (-s * nu1[:, None, :] + c * nu2[:, None, :])
    jac = np.stack([jt, jang], axis=-1)
    ranks = batched_rank(jac, rank_tol)
    return SurfaceGrid(
        map_kind="Can", axes=(("t", t_grid), ("theta", angle_grid)),
        points=points, jac_rank=ranks,
    )


def _adapted_nu_derivatives(curve, frame: AdaptedFrame) -> np.ndarray:
    """nu_i' = -(nu_i . mu') mu at the frame's grid nodes."""
    ev = TangentEvaluator(curve)
    out = np.empty_like(frame.nus)
    for i, t in enumerate(frame.grid):
        mu, mu_p, _ = _mu_jets(ev, t, frame.tau[i])
        for j in range(frame.n_normals):
            out[j, i] = -float(np.dot(frame.nus[j, i], mu_p)) * mu
    return out


def _check_offsets(frame_or_profile_normals: int, offsets) -> np.ndarray:
    offsets = np.atleast_1d(np.asarray(offsets, dtype=float))
    if offsets.shape != (frame_or_profile_normals,):
        raise ValueError(
            f"expected {frame_or_profile_normals} offset value(s), "
            f"got {offsets.shape}"
        )
    return offsets


def parallel_of_tangent(curve: Curve, frame: AdaptedFrame, offsets, t_grid,
                        s_grid, ruling: str = "unit",
                        rank_tol: float = DEFAULT_RANK_TOL) -> SurfaceGrid:
    """Offset the tangent map by a parallel normal field:
    (t, s) -> f(t) + s r(t) + sum_i u_i nu_i(t)."""
    t_grid = np.asarray(t_grid, dtype=float)
    s_grid = np.asarray(s_grid, dtype=float)
    _check_grid_match(t_grid, frame.grid, "parallel t-grid")
    offsets = _check_offsets(frame.n_normals, offsets)
    pts, fp, r, rp = _ruling_fields(curve, frame.tau, t_grid, ruling)
    nu = frame.nus
    nup = _adapted_nu_derivatives(curve, frame)
    offset_vec = np.tensordot(offsets, nu, axes=(0, 0))  # (n, d)
    offset_der = np.tensordot(offsets, nup, axes=(0, 0))
    points = (
        pts[:, None, :]
        + s_grid[None, :, None] * r[:, None, :]
        + offset_vec[:, None, :]
    )
    jt = (
        fp[:, None, :]
        + s_grid[None, :, None] * rp[:, None, :]
        + offset_der[:, None, :]
    )
    js = np.broadcast_to(r[:, None, :], jt.shape)
    jac = np.stack([jt, js], axis=-1)
    ranks = batched_rank(jac, rank_tol)
    return SurfaceGrid(
        map_kind="Pal", axes=(("t", t_grid), ("s", s_grid)),
        points=points, jac_rank=ranks, ruling=ruling,
    )


# ---------------------------------------------------------------------------
# Singular locus and directrix


@dataclass
class SingularLocusCurve:
    """The ruling offset s(t) where a parallel's Jacobian degenerates."""

    grid: np.ndarray
    s: np.ndarray
    residuals: np.ndarray  # |s kappa - sum u_i ell_i| per sample


def singular_locus_parallel(profile: InvariantProfile, offsets,
                            kappa_tol: float = 1e-8) -> SingularLocusCurve:
    """Closed-form singular locus s(t) = sum_i u_i ell_i(t) / kappa(t)."""
    offsets = _check_offsets(profile.ells.shape[0], offsets)
    if np.min(np.abs(profile.kappa)) <= kappa_tol:
        raise InflectionError(
            "inflection in range: the singular locus may diverge"
        )
    weighted = np.tensordot(offsets, profile.ells, axes=(0, 0))
    s = weighted / profile.kappa
    residuals = np.abs(s * profile.kappa - weighted)
    return SingularLocusCurve(grid=profile.grid, s=s, residuals=residuals)


@dataclass
class Directrix:
    """Edge of regression of a parallel of the tangent developable.

    ``tangency_residual`` is the five-point-stencil witness that g' is
    parallel to the shared tangent frame; ``tangency_floor`` estimates
    the stencil's own truncation (from fifth differences of g), which
    bounds how small the witness can be at the sampled resolution.
    """

    offsets: np.ndarray
    grid: np.ndarray
    points: np.ndarray
    tangency_residual: float
    tangency_floor: float
    provenance: str


def _five_point_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """O(h^4) interior first derivative of uniformly sampled vectors."""
    v = values
    return (-v[4:] + 8.0 * v[3:-1] - 8.0 * v[1:-3] + v[:-4]) / (12.0 * h)


def directrix(curve: Curve, frame: AdaptedFrame, profile: InvariantProfile,
              offsets, tangency_tol: float = 1e-5) -> Directrix:
    """g(t) = f(t) + sum_i u_i (ell_i/kappa tau + nu_i).

    The defining property (g' parallel to tau) is verified with a
    five-point stencil on the interior samples. Enforcement threshold is
    ``max(tangency_tol, 4 * stencil floor)`` relative to max(1, |g'|):
    the stencil cannot witness tangency below its own O(h^4) truncation,
    which is estimated from fifth differences of the sampled g, so a
    coarse grid on a wiggly curve loosens the gate instead of producing
    a false inconsistency alarm.
    """
    offsets = _check_offsets(frame.n_normals, offsets)
    _check_grid_match(frame.grid, profile.grid, "directrix profile grid")
    if np.min(np.abs(profile.kappa)) <= 1e-8:
        raise InflectionError("inflection in range: directrix undefined")
    ratio = np.tensordot(offsets, profile.ells, axes=(0, 0)) / profile.kappa
    offset_vec = np.tensordot(offsets, frame.nus, axes=(0, 0))
    pts = np.array([curve.point(t) for t in frame.grid])
    g = pts + ratio[:, None] * frame.tau + offset_vec

    residual = 0.0
    floor = 0.0
    if len(frame.grid) >= 5:
        h = np.diff(frame.grid)
        if np.allclose(h, h[0], rtol=1e-10, atol=0.0):
            h = float(h[0])
            gp = _five_point_derivative(g, h)
            tau_in = frame.tau[2:-2]
            ortho = gp - (np.sum(gp * tau_in, axis=1)[:, None]) * tau_in
            scale = np.maximum(1.0, np.linalg.norm(gp, axis=1))
            residual = float((np.linalg.norm(ortho, axis=1) / scale).max())
            if len(frame.grid) >= 7:
                g5 = np.diff(g, 5, axis=0) / h ** 5
                floor = (h ** 4 / 30.0) * float(
                    np.linalg.norm(g5, axis=1).max()
                )
            if residual > max(tangency_tol, 4.0 * floor):
                raise MathPreconditionError(
                    f"directrix tangency residual {residual:.3e} exceeds "
                    f"{max(tangency_tol, 4.0 * floor):.3e}; frame and "
                    f"profile are inconsistent"
                )
    return Directrix(
        offsets=offsets, grid=frame.grid, points=g,
        tangency_residual=residual, tangency_floor=floor,
        provenance="offsets along the shared tangent frame",
    )


@dataclass
class RightEquivalenceReport:
    """Residuals of Pal(t,s) against Tan(g)(t, s - shift(t)).

    ``shared_residual`` reuses the frame fields that built the parallel
    (an arithmetic identity, near machine precision);
    ``independent_residual`` rebuilds the directrix from a reverse-seeded
    parallel transport so the number measures frame-transport error
    rather than shared rounding. ``residual`` is the max of the two.
    """

    residual: float
    shared_residual: float
    independent_residual: float


def verify_right_equivalence(pal: SurfaceGrid, directrix_curve: Directrix,
                             frame: AdaptedFrame,
                             profile: InvariantProfile) -> RightEquivalenceReport:
    if pal.map_kind != "Pal" or pal.ruling != "unit":
        raise MathPreconditionError(
            "right-equivalence check needs a unit-ruled parallel grid"
        )
    t_grid = pal.axes[0][1]
    s_grid = pal.axes[1][1]
    _check_grid_match(t_grid, frame.grid, "right-equivalence t-grid")
    offsets = directrix_curve.offsets
    curve = frame.curve

    def tan_of(points_g, shift):
        sigma = s_grid[None, :] - shift[:, None]
        return points_g[:, None, :] + sigma[..., None] * frame.tau[:, None, :]

    shift = np.tensordot(offsets, profile.ells, axes=(0, 0)) / profile.kappa
    shared = tan_of(directrix_curve.points, shift)
    shared_residual = float(
        np.linalg.norm(pal.points - shared, axis=-1).max()
    )

    # independent route: re-transport the normal frame backwards from the
    # far end and rebuild ell, g and the shift from it; renormalization is
    # off so the comparison carries the integrator's raw error instead of
    # collapsing to the forward fields
    if frame.n_normals:
        back = surface_normal_transport(
            curve, frame.grid, frame.tau, frame.nus[:, -1, :], reverse=True,
            renormalize=False,
        )
        nbar = back.vectors
        ev = TangentEvaluator(curve)
        ells_bar = np.empty((frame.n_normals, len(t_grid)))
        for i, t in enumerate(t_grid):
            _, mu_p, _ = _mu_jets(ev, t, frame.tau[i])
            for j in range(frame.n_normals):
                ells_bar[j, i] = float(np.dot(mu_p, nbar[j, i]))
        shift_bar = np.tensordot(offsets, ells_bar, axes=(0, 0)) / profile.kappa
        pts = np.array([curve.point(t) for t in t_grid])
        g_bar = (
            pts
            + shift_bar[:, None] * frame.tau
            + np.tensordot(offsets, nbar, axes=(0, 0))
        )
        independent = tan_of(g_bar, shift_bar)
        independent_residual = float(
            np.linalg.norm(pal.points - independent, axis=-1).max()
        )
    else:
        independent_residual = shared_residual
    return RightEquivalenceReport(
        residual=max(shared_residual, independent_residual),
        shared_residual=shared_residual,
        independent_residual=independent_residual,
    )


# ---------------------------------------------------------------------------
# Lagrangian-lift (symplectic pullback) check


@dataclass
class SymplecticReport:
    max_entry: float
    samples: int


def symplectic_pullback_check(curve: Curve, fields: ParallelFields,
                              sample_ts=None, u_points=None,
                              fd_step: float = 1e-4) -> SymplecticReport:
    """Max |entry| of the canonical two-form pulled back by the lift
    (t, u) -> (f(t) + sum u_i nu_i ; sum u_i nu_i) of the normal map.

    Tangent and cotangent coordinates are identified by the Euclidean
    metric; partials are central differences of step ``fd_step`` in every
    parameter direction.
    """
    if fields.mode != "curve_normal":
        raise ValueError("symplectic check needs curve-normal parallel fields")
    p = fields.n_fields
    grid = fields.grid
    lo, hi = grid[0], grid[-1]
    if sample_ts is None:
        inner = np.linspace(lo, hi, 7)[1:-1]
        sample_ts = inner
    sample_ts = np.asarray(sample_ts, dtype=float)
    if u_points is None:
        base = np.zeros(p)
        alt = np.array([0.3 * (-1.0) ** i / (1 + i) for i in range(p)])
        u_points = [base, alt]

    def lift(t, u):
        nu = fields.eval_at([t])[:, 0, :]  # (p, d)
        offset = u @ nu
        return curve.point(t) + offset, offset

    max_entry = 0.0
    count = 0
    for t0 in sample_ts:
        for u0 in u_points:
            u0 = np.asarray(u0, dtype=float)
            npar = 1 + p
            dx = np.empty((npar, curve.dim))
            dp = np.empty((npar, curve.dim))
            for a in range(npar):
                if a == 0:
                    xp, pp = lift(t0 + fd_step, u0)
                    xm, pm = lift(t0 - fd_step, u0)
                else:
                    e = np.zeros(p)
                    e[a - 1] = fd_step
                    xp, pp = lift(t0, u0 + e)
                    xm, pm = lift(t0, u0 - e)
                dx[a] = (xp - xm) / (2.0 * fd_step)
                dp[a] = (pp - pm) / (2.0 * fd_step)
            form = dp @ dx.T
            entry = float(np.abs(form - form.T).max())
            max_entry = max(max_entry, entry)
            count += 1
    return SymplecticReport(max_entry=max_entry, samples=count)


# ---------------------------------------------------------------------------
# Normal flatness of the tangent surface (spot check along rulings)


@dataclass
class NormalFlatnessReport:
    max_residual: float
    checked: int
    skipped: int
    vacuous: bool


def normal_flatness_residual(curve: Curve, frame: AdaptedFrame, s_grid,
                             exclusion: float = 1e-7) -> NormalFlatnessReport:
    """Witness that the frame normals, extended constant along rulings,
    stay parallel for the tangent surface's normal bundle.

    At each regular node the residual is the component of the
    finite-differenced d(nu_i)/dt orthogonal to the surface's tangent
    plane and to nu_i itself. Nodes whose Jacobian smallest singular
    value falls below ``exclusion`` are skipped; if everything is
    skipped the check is vacuous (e.g. a straight segment).
    """
    s_grid = np.asarray(s_grid, dtype=float)
    t_grid = frame.grid
    ev = TangentEvaluator(curve)
    h = np.diff(t_grid)
    if not np.allclose(h, h[0], rtol=1e-10, atol=0.0):
        raise ValueError("normal-flatness check needs a uniform t-grid")
    h = float(h[0])
    nu = frame.nus
    if frame.n_normals == 0:
        return NormalFlatnessReport(0.0, 0, 0, True)
    nu_dot = (nu[:, 2:, :] - nu[:, :-2, :]) / (2.0 * h)

    max_res = 0.0
    checked = skipped = 0
    for i in range(1, len(t_grid) - 1):
        t = t_grid[i]
        tau, tau_p = ev.tau_and_prime(t, frame.tau[i])
        fp = ev.fprime(t)
        for s in s_grid:
            jt = fp + s * tau_p
            jac = np.stack([jt, tau], axis=1)
            sv = np.linalg.svd(jac, compute_uv=False)
            if sv[-1] < exclusion:
                skipped += 1
                continue
            q = orthonormal_column_basis(jac)
            for j in range(frame.n_normals):
                nd = nu_dot[j, i - 1]
                r = nd - q @ (q.T @ nd)
                r = r - float(np.dot(r, nu[j, i])) * nu[j, i]
                max_res = max(max_res, float(np.linalg.norm(r)))
            checked += 1
    return NormalFlatnessReport(
        max_residual=max_res, checked=checked, skipped=skipped,
        vacuous=checked == 0,
    )


# ---------------------------------------------------------------------------
# Normal curvature of a two-parameter surface in R^4


@dataclass
class NormalCurvatureField:
    """Per-cell normal curvature of a framed surface in R^4."""

    s_centers: np.ndarray
    t_centers: np.ndarray
    values: np.ndarray  # nan where the tangent plane degenerates
    max_abs: float


def normal_curvature_r4(surface_fn, e3_fn, e4_fn, s_grid, t_grid,
                        fd_step: float = 1e-4,
                        frame_tol: float = 1e-8,
                        area_tol: float = 1e-12) -> NormalCurvatureField:
    """Normal curvature K from the connection form of the supplied normal
    frame: the curvature two-form d(w34) is measured by circulation of
    w34 around each grid cell and divided by the tangent area form on the
    same cell (with a sign so a flat normal bundle gives K = 0).
    """
    s_grid = np.asarray(s_grid, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)

    def partials(fn, s, t):
        fs = (np.asarray(fn(s + fd_step, t)) - np.asarray(fn(s - fd_step, t))) / (2 * fd_step)
        ft = (np.asarray(fn(s, t + fd_step)) - np.asarray(fn(s, t - fd_step))) / (2 * fd_step)
        return fs, ft

    # precondition: orthonormal normal frame, orthogonal to the surface
    for s in (s_grid[0], s_grid[-1], s_grid[len(s_grid) // 2]):
        for t in (t_grid[0], t_grid[-1], t_grid[len(t_grid) // 2]):
            e3 = np.asarray(e3_fn(s, t), dtype=float)
            e4 = np.asarray(e4_fn(s, t), dtype=float)
            fs, ft = partials(surface_fn, s, t)
            checks = [
                abs(e3 @ e3 - 1.0), abs(e4 @ e4 - 1.0), abs(e3 @ e4),
                abs(e3 @ fs), abs(e3 @ ft), abs(e4 @ fs), abs(e4 @ ft),
            ]
            if max(checks) > frame_tol:
                raise MathPreconditionError(
                    "supplied normal frame is not orthonormal-normal to the "
                    f"surface within {frame_tol:g}"
                )

    def w34(s, t, direction):
        if direction == "s":
            de3 = (np.asarray(e3_fn(s + fd_step, t)) - np.asarray(e3_fn(s - fd_step, t))) / (2 * fd_step)
        else:
            de3 = (np.asarray(e3_fn(s, t + fd_step)) - np.asarray(e3_fn(s, t - fd_step))) / (2 * fd_step)
        return float(de3 @ np.asarray(e4_fn(s, t)))

    ns, nt = len(s_grid), len(t_grid)
    values = np.full((ns - 1, nt - 1), np.nan)
    s_centers = 0.5 * (s_grid[:-1] + s_grid[1:])
    t_centers = 0.5 * (t_grid[:-1] + t_grid[1:])
    for i in range(ns - 1):
        ds = s_grid[i + 1] - s_grid[i]
        sm = s_centers[i]
        for j in range(nt - 1):
            dt = t_grid[j + 1] - t_grid[j]
            tm = t_centers[j]
            circ = (
                w34(sm, t_grid[j], "s") * ds
                + w34(s_grid[i + 1], tm, "t") * dt
                - w34(sm, t_grid[j + 1], "s") * ds
                - w34(s_grid[i], tm, "t") * dt
            )
            omega = circ / (ds * dt)
            fs, ft = partials(surface_fn, sm, tm)
            ns1 = np.linalg.norm(fs)
            if ns1 < area_tol:
                continue
            e1 = fs / ns1
            w = ft - (ft @ e1) * e1
            nw = np.linalg.norm(w)
            area = ns1 * nw
            if area < area_tol:
                continue
            values[i, j] = -omega / area
    finite = values[np.isfinite(values)]
    return NormalCurvatureField(
        s_centers=s_centers, t_centers=t_centers, values=values,
        max_abs=float(np.abs(finite).max()) if finite.size else 0.0,
    )
