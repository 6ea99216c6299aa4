"""Moving frames along frontal curves.

Two distinct parallel transports live here and must not be confused:

* :func:`bishop_transport` integrates ``nu' = -(nu . tau') tau``, the
  rotation-minimizing (Bishop) transport of the *curve's* normal bundle.
  It takes p = dim - 1 initial vectors.
* :func:`adapted_frame` transports p - 1 vectors parallel along the
  *tangent surface*: their derivative is constrained to span{tau, mu},
  which reduces to ``nu_i' = -(nu_i . mu') mu`` because the tau-component
  vanishes identically (nu_i is orthogonal to mu and tau' is parallel to
  mu).

Both use classical fourth-order Runge-Kutta on the supplied grid with
per-step Gram-Schmidt renormalization; the orthonormality drift measured
before renormalization is recorded as a quality metric, and a step whose
drift exceeds the limit is rejected as a too-coarse-grid signal.

Tangent and frame derivatives at arbitrary parameter values come from
jets of the curve (exact at the evaluation point), not from grid
differencing; only fields that exist purely as ODE samples are ever
differentiated by finite differences (elsewhere in the package).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import Curve
from .errors import GridTooCoarseError, InflectionError
from .frontal import (
    DEFAULT_K_MAX,
    TangentEvaluator,
    TangentField,
    derivative_jets,
    unit_tangent,
)
from .jets import JetDomainError, derivative, jet_div, jet_mul, jet_sqrt
from .linalg import gram_schmidt, orthonormal_completion

_SEED_ORTHO_TOL = 1e-10
DEFAULT_DRIFT_LIMIT = 1e-3
DEFAULT_INFLECTION_REL_TOL = 1e-6


def _mu_jets(ev: TangentEvaluator, t: float, ref=None):
    """(mu, mu', kappa) at t from jets of the unit tangent.

    mu is tau'/|tau'| so kappa = |tau'| is nonnegative by convention;
    the (mu, kappa, ells) -> (-mu, -kappa, -ells) ambiguity is resolved
    this way throughout the package.
    """
    tau_jets = ev.tau_jet_vec(t, 2, ref)
    tp = derivative_jets(tau_jets)
    s2 = None
    for j in tp:
        q = jet_mul(j, j)
        s2 = q if s2 is None else s2 + q
    try:
        norm = jet_sqrt(s2)
    except JetDomainError as exc:
        raise InflectionError(f"inflection point in range: |tau'| = 0 at t={t}") from exc
    mu_jets = [jet_div(j, norm) for j in tp]
    mu = np.array([j.value for j in mu_jets])
    mu_p = np.array([derivative(j, 1) for j in mu_jets])
    return mu, mu_p, norm.value


@dataclass
class ParallelFields:
    """Sampled parallel normal fields produced by a frame transport."""

    curve: Curve
    grid: np.ndarray
    vectors: np.ndarray  # (n_fields, n_samples, dim)
    tau_samples: np.ndarray  # sign reference for off-grid evaluation
    mode: str  # "curve_normal" | "surface_normal"
    gram_drift_max: float
    final_gram_dev: float
    renormalized: bool

    @property
    def n_fields(self) -> int:
        return self.vectors.shape[0]

    def field_derivatives(self, index: int) -> np.ndarray:
        """Exact ODE right-hand side at the grid nodes for one field."""
        ev = TangentEvaluator(self.curve)
        out = np.empty_like(self.vectors[index])
        for i, t in enumerate(self.grid):
            rhs = _make_rhs(ev, self.mode, t, self.tau_samples[i])
            out[i] = rhs(self.vectors[index, i : i + 1])[0]
        return out

    def eval_at(self, ts) -> np.ndarray:
        """Evaluate the fields off-grid by a short RK4 step from the
        nearest node. Returns shape (n_fields, len(ts), dim)."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        ev = TangentEvaluator(self.curve)
        out = np.empty((self.n_fields, len(ts), self.curve.dim))
        for j, t in enumerate(ts):
            k = int(np.argmin(np.abs(self.grid - t)))
            y = self.vectors[:, k, :]
            h = t - self.grid[k]
            if h != 0.0:
                y = _rk4_step(ev, self.mode, self.grid[k], h, y,
                              self.tau_samples[k], self.tau_samples[k])
            out[:, j, :] = y
        return out


def _make_rhs(ev: TangentEvaluator, mode: str, t: float, ref):
    if mode == "curve_normal":
        tau, tau_p = ev.tau_and_prime(t, ref)
        return lambda y: -(y @ tau_p)[:, None] * tau[None, :]
    if mode == "surface_normal":
        mu, mu_p, _ = _mu_jets(ev, t, ref)
        return lambda y: -(y @ mu_p)[:, None] * mu[None, :]
    raise ValueError(f"unknown transport mode {mode!r}")


def _rk4_step(ev, mode, t0, h, y, ref_start, ref_end):
    f0 = _make_rhs(ev, mode, t0, ref_start)
    fm = _make_rhs(ev, mode, t0 + 0.5 * h, ref_start)
    f1 = _make_rhs(ev, mode, t0 + h, ref_end)
    k1 = f0(y)
    k2 = fm(y + 0.5 * h * k1)
    k3 = fm(y + 0.5 * h * k2)
    k4 = f1(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _ortho_basis_at(ev, mode, t, ref):
    """Vectors the transported fields must stay orthogonal to."""
    if mode == "curve_normal":
        tau, _ = ev.tau_and_prime(t, ref)
        return [tau]
    mu, _, _ = _mu_jets(ev, t, ref)
    tau = ev.tau(t, ref)
    return [tau, mu]


def _gram_deviation(rows) -> float:
    m = np.stack(rows)
    g = m @ m.T
    return float(np.abs(g - np.eye(len(rows))).max())


def _transport(curve, grid, ref_taus, seeds, mode, renormalize, drift_limit,
               reverse):
    ev = TangentEvaluator(curve)
    n = len(grid)
    order = range(n - 1, -1, -1) if reverse else range(n)
    idx = list(order)
    vectors = np.empty((len(seeds), n, curve.dim))
    y = np.array(seeds, dtype=float)
    vectors[:, idx[0], :] = y
    drift_max = 0.0
    for a, b in zip(idx[:-1], idx[1:]):
        t0, t1 = grid[a], grid[b]
        y = _rk4_step(ev, mode, t0, t1 - t0, y, ref_taus[a], ref_taus[b])
        basis = _ortho_basis_at(ev, mode, t1, ref_taus[b])
        drift = _gram_deviation(basis + list(y))
        drift_max = max(drift_max, drift)
        if drift > drift_limit:
            raise GridTooCoarseError(
                f"frame transport step rejected at t={t1}: orthonormality "
                f"drift {drift:.3e} exceeds {drift_limit:.1e}"
            )
        if renormalize:
            fixed = gram_schmidt(y, against=basis, pivot_tol=1e-8)
            if len(fixed) != len(y):
                raise GridTooCoarseError(
                    f"frame transport degenerated at t={t1}"
                )
            y = np.array(fixed)
        vectors[:, b, :] = y
    final_basis = _ortho_basis_at(ev, mode, grid[idx[-1]], ref_taus[idx[-1]])
    final_dev = _gram_deviation(final_basis + list(y))
    return vectors, drift_max, final_dev


def _validate_seeds(seeds, against, label):
    seeds = np.atleast_2d(np.asarray(seeds, dtype=float))
    rows = list(against) + list(seeds)
    if _gram_deviation(rows) > _SEED_ORTHO_TOL:
        raise ValueError(
            f"initial {label} vectors must be orthonormal and orthogonal "
            f"to the frame at the start point (tolerance {_SEED_ORTHO_TOL:g})"
        )
    return seeds


def bishop_transport(tau_field: TangentField, nu0, renormalize: bool = True,
                     drift_limit: float = DEFAULT_DRIFT_LIMIT,
                     reverse: bool = False) -> ParallelFields:
    """Parallel-transport normal vectors of the curve's normal bundle.

    Integrates ``nu' = -(nu . tau') tau`` with RK4 over the tangent
    field's grid; the result is the unique parallel extension of the
    initial vectors. ``reverse=True`` starts from the last grid point.
    """
    curve = tau_field.curve
    grid = tau_field.grid
    start = -1 if reverse else 0
    ev = TangentEvaluator(curve)
    tau0, _ = ev.tau_and_prime(grid[start], tau_field.tau[start])
    seeds = _validate_seeds(nu0, [tau0], "normal")
    vectors, drift_max, final_dev = _transport(
        curve, grid, tau_field.tau, seeds, "curve_normal", renormalize,
        drift_limit, reverse,
    )
    return ParallelFields(
        curve=curve, grid=grid, vectors=vectors, tau_samples=tau_field.tau,
        mode="curve_normal", gram_drift_max=drift_max,
        final_gram_dev=final_dev, renormalized=renormalize,
    )


def surface_normal_transport(curve, grid, ref_taus, seeds,
                             renormalize: bool = True,
                             drift_limit: float = DEFAULT_DRIFT_LIMIT,
                             reverse: bool = False) -> ParallelFields:
    """Transport vectors parallel for the tangent surface's normal bundle."""
    ev = TangentEvaluator(curve)
    start = -1 if reverse else 0
    basis = _ortho_basis_at(ev, "surface_normal", grid[start], ref_taus[start])
    seeds = _validate_seeds(seeds, basis, "surface-normal")
    vectors, drift_max, final_dev = _transport(
        curve, grid, ref_taus, seeds, "surface_normal", renormalize,
        drift_limit, reverse,
    )
    return ParallelFields(
        curve=curve, grid=np.asarray(grid, dtype=float), vectors=vectors,
        tau_samples=np.asarray(ref_taus, dtype=float), mode="surface_normal",
        gram_drift_max=drift_max, final_gram_dev=final_dev,
        renormalized=renormalize,
    )


# ---------------------------------------------------------------------------
# Adapted frame of the tangent surface


@dataclass
class AdaptedFrame:
    """Orthonormal frame {tau, mu, nu_1..nu_{p-1}} sampled along a curve."""

    curve: Curve
    grid: np.ndarray
    tau: np.ndarray  # (N, dim)
    mu: np.ndarray  # (N, dim)
    kappa: np.ndarray  # (N,)
    nus: np.ndarray  # (p-1, N, dim)
    gram_drift_max: float

    @property
    def n_normals(self) -> int:
        return self.nus.shape[0]

    def gram_deviation(self) -> float:
        devs = []
        for i in range(len(self.grid)):
            rows = [self.tau[i], self.mu[i]] + [nu[i] for nu in self.nus]
            devs.append(_gram_deviation(rows))
        return max(devs)


def adapted_frame(curve: Curve, grid, nu0=None, k_max: int = DEFAULT_K_MAX,
                  inflection_rel_tol: float = DEFAULT_INFLECTION_REL_TOL,
                  renormalize: bool = True,
                  drift_limit: float = DEFAULT_DRIFT_LIMIT) -> AdaptedFrame:
    """Build the adapted frame {tau, mu, nu_i} along a curve without
    inflection points.

    tau comes from the chained unit tangent, mu = tau'/|tau'|, and the
    nu_i are the surface-normal parallel transport of ``nu0`` (default: a
    canonical Gram-Schmidt completion of the standard basis against
    {tau, mu} at the first grid point).
    """
    grid = np.asarray(grid, dtype=float)
    tf = unit_tangent(curve, grid, k_max=k_max)
    ev = TangentEvaluator(curve, k_max=k_max)
    n, d = len(grid), curve.dim
    mu = np.empty((n, d))
    kappa = np.empty(n)
    for i, t in enumerate(grid):
        mu[i], _, kappa[i] = _mu_jets(ev, t, tf.tau[i])
    if kappa.max() <= 0.0:
        raise InflectionError("inflection point in range: straight segment")
    if kappa.min() < inflection_rel_tol * kappa.max():
        worst = grid[int(np.argmin(kappa))]
        raise InflectionError(f"inflection point in range near t={worst}")

    q = curve.codim - 1
    if q == 0:
        nus = np.empty((0, n, d))
        drift = 0.0
    else:
        if nu0 is None:
            seeds = orthonormal_completion([tf.tau[0], mu[0]], d, q)
        else:
            seeds = np.atleast_2d(np.asarray(nu0, dtype=float))
            if seeds.shape != (q, d):
                raise ValueError(
                    f"expected {q} initial normal vector(s) of dimension {d}"
                )
        fields = surface_normal_transport(
            curve, grid, tf.tau, seeds, renormalize=renormalize,
            drift_limit=drift_limit,
        )
        nus = fields.vectors
        drift = fields.gram_drift_max
    return AdaptedFrame(
        curve=curve, grid=grid, tau=tf.tau, mu=mu, kappa=kappa, nus=nus,
        gram_drift_max=drift,
    )


# ---------------------------------------------------------------------------
# Invariants


@dataclass
class InvariantProfile:
    """Sampled structure-equation invariants: f' = a tau, tau' = kappa mu,
    mu' = -kappa tau + sum_i ell_i nu_i."""

    grid: np.ndarray
    a: np.ndarray
    kappa: np.ndarray
    ells: np.ndarray  # (p-1, N)


def invariants(curve: Curve, frame: AdaptedFrame) -> InvariantProfile:
    ev = TangentEvaluator(curve)
    n = len(frame.grid)
    a = np.empty(n)
    ells = np.empty((frame.n_normals, n))
    for i, t in enumerate(frame.grid):
        a[i] = float(np.dot(ev.fprime(t), frame.tau[i]))
        if frame.n_normals:
            _, mu_p, _ = _mu_jets(ev, t, frame.tau[i])
            for j in range(frame.n_normals):
                ells[j, i] = float(np.dot(mu_p, frame.nus[j, i]))
    return InvariantProfile(grid=frame.grid, a=a, kappa=frame.kappa.copy(),
                            ells=ells)


@dataclass
class BishopInvariants:
    """Invariants of the curve-normal-bundle system: f' = a tau,
    tau' = sum_i kappa_i nu_i, nu_i' = -kappa_i tau."""

    grid: np.ndarray
    a: np.ndarray
    kappas: np.ndarray  # (p, N)


def bishop_invariants(curve: Curve, fields: ParallelFields) -> BishopInvariants:
    if fields.mode != "curve_normal":
        raise ValueError("bishop invariants need curve-normal parallel fields")
    ev = TangentEvaluator(curve)
    n = len(fields.grid)
    a = np.empty(n)
    kappas = np.empty((fields.n_fields, n))
    for i, t in enumerate(fields.grid):
        tau, tau_p = ev.tau_and_prime(t, fields.tau_samples[i])
        a[i] = float(np.dot(ev.fprime(t), tau))
        kappas[:, i] = fields.vectors[:, i, :] @ tau_p
    return BishopInvariants(grid=fields.grid, a=a, kappas=kappas)


# ---------------------------------------------------------------------------
# Structure-equation residuals (central differences of the sampled frames)


def _central_diff(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    h = np.diff(grid)
    if not np.allclose(h, h[0], rtol=1e-10, atol=0.0):
        raise ValueError("structure residuals need a uniform grid")
    return (values[2:] - values[:-2]) / (2.0 * h[0])


def _scaled_max(residual_rows: np.ndarray, derivative_rows: np.ndarray) -> float:
    scale = np.maximum(1.0, np.linalg.norm(derivative_rows, axis=-1))
    return float((np.linalg.norm(residual_rows, axis=-1) / scale).max())


def structure_residuals_adapted(curve: Curve, frame: AdaptedFrame,
                                profile: InvariantProfile) -> dict:
    """Max scaled residuals of the tangent-surface frame system
    tau' = kappa mu, mu' = -kappa tau + sum ell_i nu_i, nu_i' = -ell_i mu,
    f' = a tau, with frame derivatives by central differences at interior
    samples."""
    grid = frame.grid
    ev = TangentEvaluator(curve)
    inner = slice(1, -1)
    out = {}

    fp = np.array([ev.fprime(t) for t in grid])
    out["f_prime"] = _scaled_max(fp - profile.a[:, None] * frame.tau, fp)

    tau_d = _central_diff(frame.tau, grid)
    pred = (profile.kappa[:, None] * frame.mu)[inner]
    out["tau_prime"] = _scaled_max(tau_d - pred, tau_d)

    mu_d = _central_diff(frame.mu, grid)
    pred = -(profile.kappa[:, None] * frame.tau)[inner]
    for j in range(frame.n_normals):
        pred = pred + (profile.ells[j][:, None] * frame.nus[j])[inner]
    out["mu_prime"] = _scaled_max(mu_d - pred, mu_d)

    for j in range(frame.n_normals):
        nu_d = _central_diff(frame.nus[j], grid)
        pred = -(profile.ells[j][:, None] * frame.mu)[inner]
        out[f"nu{j + 1}_prime"] = _scaled_max(nu_d - pred, nu_d)
    return out


def structure_residuals_bishop(curve: Curve, fields: ParallelFields,
                               inv: BishopInvariants) -> dict:
    """Max scaled residuals of the curve-normal frame system
    tau' = sum kappa_i nu_i, nu_i' = -kappa_i tau, f' = a tau."""
    grid = fields.grid
    ev = TangentEvaluator(curve)
    inner = slice(1, -1)
    taus = np.empty((len(grid), curve.dim))
    fp = np.empty_like(taus)
    for i, t in enumerate(grid):
        taus[i] = ev.tau(t, fields.tau_samples[i])
        fp[i] = ev.fprime(t)
    out = {"f_prime": _scaled_max(fp - inv.a[:, None] * taus, fp)}

    tau_d = _central_diff(taus, grid)
    pred = np.zeros_like(tau_d)
    for j in range(fields.n_fields):
        pred += (inv.kappas[j][:, None] * fields.vectors[j])[inner]
    out["tau_prime"] = _scaled_max(tau_d - pred, tau_d)

    for j in range(fields.n_fields):
        nu_d = _central_diff(fields.vectors[j], grid)
        pred = -(inv.kappas[j][:, None] * taus)[inner]
        out[f"nu{j + 1}_prime"] = _scaled_max(nu_d - pred, nu_d)
    return out


# ---------------------------------------------------------------------------
# Inflection points


def _bisect(fn, lo, hi, iterations: int = 80) -> float:
    flo = fn(lo)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        fmid = fn(mid)
        if (flo <= 0.0) == (fmid <= 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _ternary_min(fn, lo, hi, iterations: int = 100):
    for _ in range(iterations):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if fn(m1) <= fn(m2):
            hi = m2
        else:
            lo = m1
    mid = 0.5 * (lo + hi)
    return mid, fn(mid)


def inflection_points(curve: Curve, grid, tol: float = 1e-7) -> list:
    """Parameter intervals where the unit tangent's derivative vanishes.

    Grid samples below ``tol`` seed intervals whose endpoints are refined
    by bisection on |tau'| - tol; interior local minima of |tau'| are
    additionally probed so a zero falling between samples is still found.
    """
    grid = np.asarray(grid, dtype=float)
    ev = TangentEvaluator(curve)
    kappas = np.array([ev.kappa(t) for t in grid])
    below = kappas < tol
    intervals = []

    def left_edge(i):
        if i == 0 or not (kappas[i - 1] >= tol):
            return grid[max(i - 1, 0)] if i > 0 else grid[0]
        return _bisect(lambda t: ev.kappa(t) - tol, grid[i - 1], grid[i])

    def right_edge(i):
        if i == len(grid) - 1 or not (kappas[i + 1] >= tol):
            return grid[min(i + 1, len(grid) - 1)] if i < len(grid) - 1 else grid[-1]
        return _bisect(lambda t: ev.kappa(t) - tol, grid[i + 1], grid[i])

    i = 0
    while i < len(grid):
        if below[i]:
            j = i
            while j + 1 < len(grid) and below[j + 1]:
                j += 1
            lo = grid[0] if i == 0 else left_edge(i)
            hi = grid[-1] if j == len(grid) - 1 else right_edge(j)
            intervals.append((float(lo), float(hi)))
            i = j + 1
        else:
            i += 1

    # minima hiding between samples
    for i in range(1, len(grid) - 1):
        if below[i - 1] or below[i] or below[i + 1]:
            continue
        if kappas[i] <= kappas[i - 1] and kappas[i] <= kappas[i + 1]:
            t_min, k_min = _ternary_min(ev.kappa, grid[i - 1], grid[i + 1])
            if k_min < tol:
                lo = _bisect(lambda t: ev.kappa(t) - tol, grid[i - 1], t_min)
                hi = _bisect(lambda t: ev.kappa(t) - tol, grid[i + 1], t_min)
                intervals.append((float(lo), float(hi)))

    intervals.sort()
    merged = []
    for lo, hi in intervals:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(hi, merged[-1][1]))
        else:
            merged.append((lo, hi))
    return merged


# ---------------------------------------------------------------------------
# Unit normal of the tangent surface of a space curve


def tangent_surface_unit_normal(curve: Curve, t: float, order: int = 2):
    """Unit normal field of the tangent developable of a curve in R^3.

    Computed as normalize(f' x f'') with the leading parameter power
    factored out of the cross-product jet, so the field extends smoothly
    through inflection points (where f' x f'' vanishes). Returns the
    value and the component jets at t; derivatives of the field are
    ``derivative(jets[i], k)``.
    """
    if curve.dim != 3:
        raise ValueError("tangent-surface normal implemented for dim == 3")
    from .frontal import _COEFF_DROP, _shift_jet, _truncate_jet

    reserve = 6
    fj = curve.jets(t, order + reserve + 2)
    fp = derivative_jets(fj)
    fpp = derivative_jets(fj, times=2)
    fp = [_truncate_jet(j, order + reserve) for j in fp]
    fpp = [_truncate_jet(j, order + reserve) for j in fpp]
    cross = [
        jet_mul(fp[1], fpp[2]) - jet_mul(fp[2], fpp[1]),
        jet_mul(fp[2], fpp[0]) - jet_mul(fp[0], fpp[2]),
        jet_mul(fp[0], fpp[1]) - jet_mul(fp[1], fpp[0]),
    ]
    coeffs = np.array([j.coeffs for j in cross]).T
    norms = np.linalg.norm(coeffs, axis=1)
    scale = norms.max()
    if scale == 0.0:
        raise InflectionError(
            f"tangent-surface normal undetermined at t={t}"
        )
    m = int(np.argmax(norms > _COEFF_DROP * scale))
    shifted = [_truncate_jet(_shift_jet(j, m), order) for j in cross]
    s2 = None
    for j in shifted:
        q = jet_mul(j, j)
        s2 = q if s2 is None else s2 + q
    norm = jet_sqrt(s2)
    nu_jets = [jet_div(j, norm) for j in shifted]
    value = np.array([j.value for j in nu_jets])
    return value, nu_jets
