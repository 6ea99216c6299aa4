"""Command-line front end.

Subcommands: ``invariants``, ``surface``, ``verify``, ``frontality``,
``bishop``. A curve comes either from the built-in corpus (``--curve``)
or from a config file (``--config``). Exit codes: 0 success/pass,
1 configuration error, 2 violated math precondition or failed check,
3 I/O error. All output is deterministic: identical inputs produce
byte-identical bytes.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import corpus
from .config import load_config
from .errors import ConfigError, InflectionError, MathPreconditionError
from .exports import (
    csv_lines,
    fmt,
    jsonl_line,
    surface_csv_lines,
    surface_obj_lines,
    write_lines,
)
from .frames import (
    TangentEvaluator,
    adapted_frame,
    bishop_invariants,
    bishop_transport,
    invariants,
    structure_residuals_adapted,
    structure_residuals_bishop,
)
from .frontal import contact_orders, unit_tangent
from .linalg import orthonormal_completion
from .surfaces import (
    SurfaceGrid,
    canal_surface,
    directrix,
    normal_flatness_residual,
    normal_map,
    parallel_of_tangent,
    symplectic_pullback_check,
    tangent_map,
    verify_right_equivalence,
)

SURFACE_KINDS = ("tan", "nor", "pal", "can", "directrix-tan")
VERIFY_CHECKS = ("theorem22", "theorem21", "symplectic", "structure")

_STRUCTURE_SPACING = 1e-3


def _add_curve_args(p):
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--curve", help="built-in curve id: "
                       + ", ".join(corpus.CORPUS_IDS))
    group.add_argument("--config", help="path to a curve config file")


def _add_grid_args(p):
    p.add_argument("--t-steps", type=int, default=None)
    p.add_argument("--s-steps", type=int, default=None)
    p.add_argument("--s-range", type=float, nargs=2, default=None,
                   metavar=("LO", "HI"))


class _CurveContext:
    def __init__(self, args):
        self.entry = None
        if args.curve:
            self.entry = corpus.get_entry(args.curve)
            self.curve = self.entry.curve
            t_steps, s_steps, s_range = 201, 101, (-1.0, 1.0)
        else:
            cfg = load_config(args.config)
            self.curve = cfg.build_curve()
            t_steps, s_steps = cfg.grid.t_steps, cfg.grid.s_steps
            s_range = cfg.grid.s_range
        if getattr(args, "t_steps", None):
            t_steps = args.t_steps
        if getattr(args, "s_steps", None):
            s_steps = args.s_steps
        if getattr(args, "s_range", None):
            s_range = tuple(args.s_range)
        if t_steps < 2 or s_steps < 2:
            raise ConfigError("step counts must be >= 2")
        self.t_steps = t_steps
        self.s_steps = s_steps
        self.s_range = s_range

    @property
    def t_grid(self):
        return self.curve.grid(self.t_steps)

    @property
    def s_grid(self):
        return np.linspace(self.s_range[0], self.s_range[1], self.s_steps)

    def frame_seed(self, t0):
        if self.entry is not None and self.entry.frame_seed is not None:
            return self.entry.frame_seed(t0)
        return None

    def bishop_fields(self, t_grid, renormalize=True):
        tf = unit_tangent(self.curve, t_grid)
        if self.entry is not None and self.entry.bishop_seed is not None:
            seeds = self.entry.bishop_seed(t_grid[0])
        else:
            seeds = orthonormal_completion(
                [tf.tau[0]], self.curve.dim, self.curve.codim
            )
        return bishop_transport(tf, seeds, renormalize=renormalize)

    def offsets(self, args):
        wanted = self.curve.codim - 1
        if wanted == 0:
            return np.zeros(0)
        if args.u is None:
            if wanted == 1:
                return np.array([0.5])
            raise ConfigError(
                f"this curve needs {wanted} offsets: pass --u once per offset"
            )
        offs = np.asarray(args.u, dtype=float)
        if offs.shape != (wanted,):
            raise ConfigError(
                f"expected {wanted} offset value(s), got {len(offs)}"
            )
        return offs


def _emit(lines, out_path):
    if out_path:
        write_lines(lines, out_path)
    else:
        sys.stdout.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# invariants


def cmd_invariants(args) -> int:
    ctx = _CurveContext(args)
    curve = ctx.curve
    t_grid = ctx.t_grid
    ev = TangentEvaluator(curve)
    kappas = np.array([ev.kappa(t) for t in t_grid])
    q = curve.codim - 1
    header = ["t", "a", "kappa"] + [f"ell_{i + 1}" for i in range(q)]
    if kappas.max() < 1e-12:
        # straight segment: any constant normal frame is parallel
        tf = unit_tangent(curve, t_grid)
        a = np.array([float(np.dot(ev.fprime(t), tf.tau[i]))
                      for i, t in enumerate(t_grid)])
        rows = [[t_grid[i], a[i], 0.0] + [0.0] * q for i in range(len(t_grid))]
    else:
        frame = adapted_frame(curve, t_grid, nu0=ctx.frame_seed(t_grid[0]))
        prof = invariants(curve, frame)
        rows = [
            [t_grid[i], prof.a[i], prof.kappa[i]]
            + [prof.ells[j, i] for j in range(q)]
            for i in range(len(t_grid))
        ]
    _emit(csv_lines(header, rows), args.out)
    return 0


# ---------------------------------------------------------------------------
# surface


def _build_surface(ctx, args) -> SurfaceGrid:
    curve = ctx.curve
    t_grid = ctx.t_grid
    if args.kind == "tan":
        tf = unit_tangent(curve, t_grid)
        return tangent_map(curve, tf, t_grid, ctx.s_grid, ruling=args.ruling)
    if args.kind == "nor":
        fields = ctx.bishop_fields(t_grid)
        # the normal map is sampled over all 1+p parameters; keep the
        # default per-axis resolution tame for higher codimension
        p = curve.codim
        steps = ctx.s_steps if p == 1 else min(ctx.s_steps, 11)
        u_axis = np.linspace(ctx.s_range[0], ctx.s_range[1], steps)
        if ctx.t_steps * steps ** p > 2_000_000:
            raise ConfigError(
                "normal-map grid too large; lower --t-steps/--s-steps"
            )
        return normal_map(curve, fields, t_grid, u_axis)
    if args.kind == "can":
        fields = ctx.bishop_fields(t_grid)
        theta = np.linspace(0.0, 2.0 * math.pi, ctx.s_steps)
        return canal_surface(curve, fields, args.r, t_grid, theta)
    offsets = ctx.offsets(args)
    frame = adapted_frame(curve, t_grid, nu0=ctx.frame_seed(t_grid[0]))
    if args.kind == "pal":
        return parallel_of_tangent(
            curve, frame, offsets, t_grid, ctx.s_grid, ruling=args.ruling
        )
    # directrix-tan: tangent map of the edge of regression, ruled by the
    # shared tangent frame
    prof = invariants(curve, frame)
    dirx = directrix(curve, frame, prof, offsets)
    points = (
        dirx.points[:, None, :]
        + ctx.s_grid[None, :, None] * frame.tau[:, None, :]
    )
    ranks = np.full(points.shape[:-1], 2, dtype=int)
    sing = np.abs(ctx.s_grid[None, :] * frame.kappa[:, None]) < 1e-12
    ranks[sing] = 1
    return SurfaceGrid(
        map_kind="TanOfDirectrix",
        axes=(("t", t_grid), ("s", ctx.s_grid)),
        points=points, jac_rank=ranks, ruling="unit",
    )


def cmd_surface(args) -> int:
    ctx = _CurveContext(args)
    grid = _build_surface(ctx, args)
    if args.export == "obj":
        lines = surface_obj_lines(grid)
    else:
        lines = surface_csv_lines(grid)
    _emit(lines, args.out)
    return 0


# ---------------------------------------------------------------------------
# verify


def _verify_theorem22(ctx, args, records):
    curve = ctx.curve
    if curve.codim < 2:
        raise MathPreconditionError(
            "parallel-equivalence check needs codimension >= 2"
        )
    offsets = ctx.offsets(args)
    t_grid = ctx.t_grid
    frame = adapted_frame(curve, t_grid, nu0=ctx.frame_seed(t_grid[0]))
    prof = invariants(curve, frame)
    pal = parallel_of_tangent(curve, frame, offsets, t_grid, ctx.s_grid)
    dirx = directrix(curve, frame, prof, offsets)
    report = verify_right_equivalence(pal, dirx, frame, prof)
    passed = report.residual <= args.tol
    records.append({
        "check": "theorem22", "curve": curve.name,
        "offsets": [float(u) for u in offsets],
        "residual": report.residual,
        "shared_residual": report.shared_residual,
        "independent_residual": report.independent_residual,
        "tolerance": args.tol, "pass": passed,
    })
    lines = [
        f"check theorem22 on {curve.name}: {'PASS' if passed else 'FAIL'}",
        f"  max |parallel - reparametrized tangent map of directrix| = "
        f"{report.residual:.6e} (tolerance {args.tol:.1e})",
        f"  shared-frame identity residual = {report.shared_residual:.6e}",
        f"  independent-transport residual = {report.independent_residual:.6e}",
    ]
    return passed, lines


def _verify_theorem21(ctx, args, records):
    curve = ctx.curve
    # the parallelism witness differentiates the transported fields by
    # central differences, so it needs a fine parameter grid; a handful
    # of ruling offsets is plenty because the normal spaces are constant
    # along each ruling
    span = curve.domain[1] - curve.domain[0]
    steps = max(ctx.t_steps, int(math.ceil(span / _STRUCTURE_SPACING)) + 1)
    t_grid = curve.grid(steps)
    s_grid = np.linspace(ctx.s_range[0], ctx.s_range[1], min(ctx.s_steps, 9))
    try:
        frame = adapted_frame(curve, t_grid, nu0=ctx.frame_seed(t_grid[0]))
    except InflectionError:
        ev = TangentEvaluator(curve)
        if max(ev.kappa(t) for t in t_grid) < 1e-12:
            lines = [f"check theorem21 on {curve.name}: PASS (vacuous)",
                     "  every sampled node of the tangent map is singular"]
            records.append({
                "check": "theorem21", "curve": curve.name, "residual": 0.0,
                "tolerance": args.tol, "pass": True, "vacuous": True,
            })
            return True, lines
        raise
    report = normal_flatness_residual(curve, frame, s_grid)
    passed = report.vacuous or report.max_residual <= args.tol
    records.append({
        "check": "theorem21", "curve": curve.name,
        "residual": report.max_residual, "tolerance": args.tol,
        "pass": passed, "vacuous": report.vacuous,
        "checked_nodes": report.checked, "skipped_nodes": report.skipped,
    })
    lines = [
        f"check theorem21 on {curve.name}: {'PASS' if passed else 'FAIL'}"
        + (" (vacuous)" if report.vacuous else ""),
        f"  max normal-parallelism residual on the tangent surface = "
        f"{report.max_residual:.6e} (tolerance {args.tol:.1e})",
        f"  nodes checked {report.checked}, skipped near the singular set "
        f"{report.skipped}",
    ]
    return passed, lines


def _verify_symplectic(ctx, args, records):
    curve = ctx.curve
    fields = ctx.bishop_fields(ctx.t_grid)
    report = symplectic_pullback_check(curve, fields, fd_step=args.fd_step)
    passed = report.max_entry <= args.tol
    records.append({
        "check": "symplectic", "curve": curve.name,
        "residual": report.max_entry, "fd_step": args.fd_step,
        "tolerance": args.tol, "pass": passed,
    })
    lines = [
        f"check symplectic on {curve.name}: {'PASS' if passed else 'FAIL'}",
        f"  max pullback entry of the canonical two-form = "
        f"{report.max_entry:.6e} (tolerance {args.tol:.1e})",
    ]
    return passed, lines


def _verify_structure(ctx, args, records):
    curve = ctx.curve
    span = curve.domain[1] - curve.domain[0]
    steps = max(ctx.t_steps, int(math.ceil(span / _STRUCTURE_SPACING)) + 1)
    t_grid = curve.grid(steps)
    ev = TangentEvaluator(curve)
    residuals = {}

    fields = ctx.bishop_fields(t_grid)
    binv = bishop_invariants(curve, fields)
    for key, val in structure_residuals_bishop(curve, fields, binv).items():
        residuals[f"curve_normal.{key}"] = val

    kappas = np.array([ev.kappa(t) for t in t_grid])
    if kappas.max() >= 1e-12:
        frame = adapted_frame(curve, t_grid, nu0=ctx.frame_seed(t_grid[0]))
        prof = invariants(curve, frame)
        for key, val in structure_residuals_adapted(curve, frame, prof).items():
            residuals[f"surface_normal.{key}"] = val
    worst = max(residuals.values())
    passed = worst <= args.tol
    records.append({
        "check": "structure", "curve": curve.name,
        "residuals": {k: residuals[k] for k in sorted(residuals)},
        "residual": worst, "tolerance": args.tol, "pass": passed,
        "t_steps": steps,
    })
    lines = [f"check structure on {curve.name}: {'PASS' if passed else 'FAIL'}"]
    for key in sorted(residuals):
        lines.append(f"  {key}: {residuals[key]:.6e}")
    lines.append(f"  worst residual {worst:.6e} (tolerance {args.tol:.1e})")
    return passed, lines


def cmd_verify(args) -> int:
    ctx = _CurveContext(args)
    records = []
    runner = {
        "theorem22": _verify_theorem22,
        "theorem21": _verify_theorem21,
        "symplectic": _verify_symplectic,
        "structure": _verify_structure,
    }[args.check]
    passed, lines = runner(ctx, args, records)
    sys.stdout.write("\n".join(lines) + "\n")
    log_lines = [jsonl_line(r) for r in records]
    if args.out:
        write_lines(log_lines, args.out)
    else:
        sys.stdout.write("\n".join(log_lines) + "\n")
    return 0 if passed else 2


# ---------------------------------------------------------------------------
# frontality


def cmd_frontality(args) -> int:
    ctx = _CurveContext(args)
    curve = ctx.curve
    if args.t0 is not None:
        ts = [args.t0]
    else:
        ts = list(curve.grid(ctx.t_steps))
    lines = []
    all_sufficient = True
    for t0 in ts:
        rep = contact_orders(curve, t0, k_max=args.k_max, tol=args.tol)
        all_sufficient &= rep.frontal_sufficient
        lines.append(
            f"t0={fmt(t0)} ranks={','.join(str(r) for r in rep.ranks)} "
            f"a1={rep.a1} a2={rep.a2} "
            f"sufficient={'yes' if rep.frontal_sufficient else 'no'}"
        )
    tf = unit_tangent(curve, curve.grid(ctx.t_steps), k_max=args.k_max)
    if tf.sign_flips:
        flips = ", ".join(fmt(tf.grid[i]) for i in tf.sign_flips)
        lines.append(f"tangent-line representative sign flips near t = {flips}")
    else:
        lines.append("tangent-line representative has no sign flips")
    lines.append(
        "summary: rank 2 attained at "
        f"{'all' if all_sufficient else 'NOT all'} sampled points"
    )
    _emit(lines, args.out)
    return 0 if all_sufficient else 2


# ---------------------------------------------------------------------------
# bishop


def cmd_bishop(args) -> int:
    ctx = _CurveContext(args)
    curve = ctx.curve
    t_grid = ctx.t_grid
    fields = ctx.bishop_fields(t_grid)
    header = ["t"]
    for i in range(fields.n_fields):
        header += [f"nu{i + 1}_x{j + 1}" for j in range(curve.dim)]
    rows = []
    for k, t in enumerate(t_grid):
        row = [t]
        for i in range(fields.n_fields):
            row += list(fields.vectors[i, k])
        rows.append(row)
    _emit(csv_lines(header, rows), args.out)
    return 0


# ---------------------------------------------------------------------------
# argument wiring


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frontals",
        description="Frame fields, invariants and ruled surfaces of "
        "frontal curves, with numeric verification checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", help="CSV of t, a, kappa, ell_i")
    _add_curve_args(p)
    _add_grid_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("surface", help="sample a ruled map to OBJ or CSV")
    _add_curve_args(p)
    _add_grid_args(p)
    p.add_argument("--kind", choices=SURFACE_KINDS, required=True)
    p.add_argument("--export", choices=("obj", "csv"), default="obj")
    p.add_argument("--ruling", choices=("unit", "derivative"), default="unit")
    p.add_argument("--u", type=float, action="append",
                   help="normal offset (repeat for several)")
    p.add_argument("--r", type=float, default=0.3, help="tube radius")
    p.add_argument("--out")
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("verify", help="run a named verification check")
    _add_curve_args(p)
    _add_grid_args(p)
    p.add_argument("--check", choices=VERIFY_CHECKS, required=True)
    p.add_argument("--u", type=float, action="append")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--fd-step", type=float, default=1e-4)
    p.add_argument("--out", help="JSON-lines residual log path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("frontality", help="rank profile of the derivative "
                       "matrix across the parameter grid")
    _add_curve_args(p)
    _add_grid_args(p)
    p.add_argument("--t0", type=float, default=None)
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out")
    p.set_defaults(func=cmd_frontality)

    p = sub.add_parser("bishop", help="CSV of parallel-transported normal "
                       "fields of the curve")
    _add_curve_args(p)
    _add_grid_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bishop)
    return parser


_DEFAULT_TOLS = {
    "theorem22": 1e-5,
    "theorem21": 1e-5,
    "symplectic": 1e-6,
    "structure": 1e-5,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "check", None) and args.tol is None:
        args.tol = _DEFAULT_TOLS[args.check]
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except MathPreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
