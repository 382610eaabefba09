"""Wavefront OBJ export of quadric sample meshes and line/segment polylines.

OBJ is used because it is universally viewable and trivially parseable:
meshes are vertices plus triangular faces, polylines use OBJ line
elements.  Coordinates are written with 17 significant digits so export
is deterministic and lossless.
"""

from __future__ import annotations

import numpy as np

from .errors import PreconditionError
from .quadric import Line3, Quadric3, Segment3, sample_quadric_mesh


def _fmt(x: float) -> str:
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return f"{x:.17g}"


def obj_mesh_text(vertices: np.ndarray, triangles: np.ndarray) -> str:
    lines = ["# quadric surface sample mesh"]
    for v in vertices:
        lines.append("v " + " ".join(_fmt(float(c)) for c in v))
    for t in triangles:
        lines.append(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}")
    return "\n".join(lines) + "\n"


def obj_polylines_text(polylines) -> str:
    lines = ["# polylines"]
    offset = 1
    body = []
    for pts in polylines:
        pts = np.asarray(pts, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 3:
            raise PreconditionError("polyline needs at least two 3-points")
        for p in pts:
            lines.append("v " + " ".join(_fmt(float(c)) for c in p))
        body.append("l " + " ".join(str(offset + i) for i in range(pts.shape[0])))
        offset += pts.shape[0]
    return "\n".join(lines + body) + "\n"


def write_quadric_mesh(path: str, q: Quadric3, box_min, box_max,
                       resolution: int = 48) -> int:
    """Write the surface mesh inside the box; returns the vertex count."""
    verts, tris = sample_quadric_mesh(q, box_min, box_max, resolution)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(obj_mesh_text(verts, tris))
    return verts.shape[0]


def clip_line_to_box(line: Line3, box_min, box_max) -> np.ndarray | None:
    """Endpoints of the portion of a line inside an axis-aligned box."""
    box_min = np.asarray(box_min, dtype=float)
    box_max = np.asarray(box_max, dtype=float)
    t_lo, t_hi = -np.inf, np.inf
    for k in range(3):
        d = line.direction[k]
        p = line.point[k]
        if abs(d) < 1e-15:
            if not (box_min[k] - 1e-12 <= p <= box_max[k] + 1e-12):
                return None
            continue
        lo, hi = (box_min[k] - p) / d, (box_max[k] - p) / d
        if lo > hi:
            lo, hi = hi, lo
        t_lo, t_hi = max(t_lo, lo), min(t_hi, hi)
    if not np.isfinite(t_lo) or not np.isfinite(t_hi) or t_lo >= t_hi:
        return None
    return np.array([line.at(t_lo), line.at(t_hi)])


def write_polylines(path: str, lines=(), segments=(), box_min=None,
                    box_max=None) -> int:
    """Write lines (clipped to the box) and segments as OBJ polylines."""
    polylines = []
    for line in lines:
        if box_min is None or box_max is None:
            raise PreconditionError("a bounding box is required to draw lines")
        clipped = clip_line_to_box(line, box_min, box_max)
        if clipped is not None:
            polylines.append(clipped)
    for seg in segments:
        seg = seg if isinstance(seg, Segment3) else Segment3(*seg)
        polylines.append(np.array([seg.a, seg.b]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(obj_polylines_text(polylines))
    return len(polylines)
