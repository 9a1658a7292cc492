"""Flat-file emission and parsing: trajectory CSV, summary JSON, SVG plots.

The CSV schema, in exact column order, is

    t, q1..qn, v1..vn, z, E, ell, event_flag

where v holds velocities or momenta depending on the formulation, ell is
the planar angular quantity x vy - y vx (0.0 for non-planar systems),
and event_flag is 0 for flow samples, 1 for the pre-impact limit, 2 for
the post-impact limit. Floats are printed with 17 significant digits so
a written file round-trips bit for bit. JSON output is sorted-key and
indent-2, so identical runs produce identical bytes. SVG plots are
hand-assembled (no rendering dependency): boundary outline plus the
sampled polyline in a fixed 800 x 800 viewport.
"""

from __future__ import annotations

import json
from typing import Optional

import numpy as np

__all__ = [
    "format_float",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "write_summary_json",
    "svg_document",
    "write_svg",
]


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def csv_header(n: int) -> list:
    return (["t"]
            + [f"q{i + 1}" for i in range(n)]
            + [f"v{i + 1}" for i in range(n)]
            + ["z", "E", "ell", "event_flag"])


def write_trajectory_csv(path, times, states, flags, energies, ells, n: int) -> None:
    times = np.asarray(times, dtype=float)
    states = np.asarray(states, dtype=float)
    lines = [",".join(csv_header(n))]
    for k in range(times.size):
        row = [format_float(times[k])]
        row += [format_float(v) for v in states[k]]
        row += [format_float(energies[k]), format_float(ells[k]), str(int(flags[k]))]
        lines.append(",".join(row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_trajectory_csv(path) -> dict:
    """Parse a trajectory CSV back into arrays; infers n from the header."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty trajectory file")
    header = lines[0].split(",")
    n_state_cols = len(header) - 5   # t, z, E, ell, event_flag
    if n_state_cols <= 0 or n_state_cols % 2 != 0:
        raise ValueError(f"{path}: malformed header {header!r}")
    n = n_state_cols // 2
    if header != csv_header(n):
        raise ValueError(f"{path}: header does not match the trajectory schema")
    rows = []
    for i, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != len(header):
            raise ValueError(f"{path}: row {i} has {len(parts)} fields, expected {len(header)}")
        rows.append([float(p) for p in parts])
    if not rows:
        raise ValueError(f"{path}: trajectory file has a header but no data rows")
    data = np.array(rows, dtype=float)
    return {
        "n": n,
        "t": data[:, 0],
        "q": data[:, 1:1 + n],
        "v": data[:, 1 + n:1 + 2 * n],
        "z": data[:, 1 + 2 * n],
        "E": data[:, 2 + 2 * n],
        "ell": data[:, 3 + 2 * n],
        "flag": data[:, 4 + 2 * n].astype(int),
    }


def write_summary_json(path, summary: dict) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _viewbox(boundary, points: Optional[np.ndarray]):
    xs, ys = [], []
    if boundary is not None:
        kind = boundary[0]
        if kind == "circle":
            r = boundary[1]
            xs += [-r, r]; ys += [-r, r]
        elif kind == "ellipse":
            a, b = boundary[1], boundary[2]
            xs += [-a, a]; ys += [-b, b]
    if points is not None and len(points):
        xs += [float(np.min(points[:, 0])), float(np.max(points[:, 0]))]
        ys += [float(np.min(points[:, 1])), float(np.max(points[:, 1]))]
    if not xs:
        xs, ys = [-1.0, 1.0], [-1.0, 1.0]
    half = 1.05 * max(max(abs(v) for v in xs), max(abs(v) for v in ys), 1e-9)
    return half


def svg_document(boundary, points: Optional[np.ndarray], stroke: str = "#1f4e8c") -> str:
    """SVG with the boundary outline and the sampled (x, y) polyline.

    ``boundary`` is ("circle", r), ("ellipse", a, b), or None; the y axis
    is flipped so the picture is in the usual mathematical orientation.
    """
    half = _viewbox(boundary, points)
    vb = f"{-half:.6f} {-half:.6f} {2 * half:.6f} {2 * half:.6f}"
    lw = 2 * half / 400.0
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="800" height="800" '
        f'viewBox="{vb}">',
        f'<rect x="{-half:.6f}" y="{-half:.6f}" width="{2 * half:.6f}" '
        f'height="{2 * half:.6f}" fill="white"/>',
        '<g transform="scale(1,-1)">',
    ]
    if boundary is not None:
        if boundary[0] == "circle":
            parts.append(
                f'<circle cx="0" cy="0" r="{boundary[1]:.6f}" fill="none" '
                f'stroke="black" stroke-width="{lw:.6f}"/>')
        elif boundary[0] == "ellipse":
            parts.append(
                f'<ellipse cx="0" cy="0" rx="{boundary[1]:.6f}" ry="{boundary[2]:.6f}" '
                f'fill="none" stroke="black" stroke-width="{lw:.6f}"/>')
    if points is not None and len(points):
        pts = " ".join(f"{p[0]:.6f},{p[1]:.6f}" for p in points)
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{stroke}" '
            f'stroke-width="{lw:.6f}"/>')
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(path, boundary, points, stroke: str = "#1f4e8c") -> None:
    with open(path, "w") as fh:
        fh.write(svg_document(boundary, points, stroke))
