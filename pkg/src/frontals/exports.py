"""Deterministic CSV, OBJ and JSON-lines writers.

All floats are formatted with ``repr`` (shortest round-trip), so
identical inputs always produce byte-identical files.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import ConfigError
from .surfaces import SurfaceGrid


def fmt(x) -> str:
    return repr(float(x))


def write_lines(lines, out) -> None:
    text = "\n".join(lines) + "\n"
    if hasattr(out, "write"):
        out.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def csv_lines(header, rows) -> list:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            cell if isinstance(cell, str) else fmt(cell) for cell in row
        ))
    return lines


def surface_csv_lines(grid: SurfaceGrid) -> list:
    axis_names = [name for name, _ in grid.axes]
    dim = grid.ambient_dim
    header = axis_names + [f"x{i + 1}" for i in range(dim)] + ["jac_rank"]
    samples = [s for _, s in grid.axes]
    rows = []
    for idx in np.ndindex(*grid.jac_rank.shape):
        row = [samples[k][idx[k]] for k in range(len(samples))]
        row += list(grid.points[idx])
        row.append(str(int(grid.jac_rank[idx])))
        rows.append(row)
    return csv_lines(header, rows)


def surface_obj_lines(grid: SurfaceGrid) -> list:
    """Triangulated mesh: vertices in grid-major order, each quad split
    into two triangles, singular nodes listed as '# singular i j' lines."""
    if grid.domain_dim != 2:
        raise ConfigError("obj export needs a two-parameter surface grid")
    if grid.ambient_dim != 3:
        raise ConfigError("obj export needs a surface in R^3")
    n0, n1 = grid.jac_rank.shape
    lines = [
        f"# {grid.map_kind} surface, {n0} x {n1} grid",
        f"# axes {grid.axes[0][0]} {grid.axes[1][0]}",
    ]
    for i in range(n0):
        for j in range(n1):
            x, y, z = grid.points[i, j]
            lines.append(f"v {fmt(x)} {fmt(y)} {fmt(z)}")
    for i in range(n0 - 1):
        for j in range(n1 - 1):
            a = i * n1 + j + 1
            b = (i + 1) * n1 + j + 1
            c = (i + 1) * n1 + j + 2
            d = i * n1 + j + 2
            lines.append(f"f {a} {b} {c}")
            lines.append(f"f {a} {c} {d}")
    flags = grid.singular_flag
    for i in range(n0):
        for j in range(n1):
            if flags[i, j]:
                lines.append(f"# singular {i} {j}")
    return lines


def jsonl_line(record: dict) -> str:
    return json.dumps(record, sort_keys=True)
