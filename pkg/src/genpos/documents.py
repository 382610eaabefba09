"""Structured JSON documents exchanged by the command-line tools.

Every document is UTF-8 JSON with a top-level "kind" discriminator and
a "version" field.  Floating-point numbers are serialized with 17
significant digits so doubles round-trip losslessly; serialization is
deterministic, which makes repeated runs byte-identical.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import PreconditionError
from .plmap import GPCertificate, PLMapSpec
from .quadric import Line3, Quadric3, Segment3

VERSION = 1


class DocumentError(PreconditionError):
    """A document is malformed or of an unexpected kind."""


def _format_number(x: float) -> str:
    if not math.isfinite(x):
        raise DocumentError("documents cannot contain non-finite numbers")
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return f"{x:.17g}"


def _serialize(obj, out: list[str]):
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_format_number(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if not isinstance(key, str):
                raise DocumentError("document keys must be strings")
            if i:
                out.append(", ")
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(": ")
            _serialize(value, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)) or isinstance(obj, np.ndarray):
        items = obj.tolist() if isinstance(obj, np.ndarray) else list(obj)
        out.append("[")
        for i, value in enumerate(items):
            if i:
                out.append(", ")
            _serialize(value, out)
        out.append("]")
    else:
        raise DocumentError(f"cannot serialize {type(obj).__name__} into a document")


def document_text(doc: dict) -> str:
    """Deterministic JSON text of a document (trailing newline included)."""
    out: list[str] = []
    _serialize(doc, out)
    return "".join(out) + "\n"


def write_document(path: str, doc: dict):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(document_text(doc))


def read_document(path: str, expect_kind: str | None = None) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DocumentError(f"cannot read document {path}: {exc}") from exc
    return check_document(doc, expect_kind)


def check_document(doc, expect_kind: str | None = None) -> dict:
    if not isinstance(doc, dict) or "kind" not in doc or "version" not in doc:
        raise DocumentError("document must carry 'kind' and 'version'")
    if doc["version"] != VERSION:
        raise DocumentError(f"unsupported document version {doc['version']!r}")
    if expect_kind is not None and doc["kind"] != expect_kind:
        raise DocumentError(f"expected kind {expect_kind!r}, got {doc['kind']!r}")
    return doc


def _vec(values, length: int) -> np.ndarray:
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.shape[0] != length or not np.all(np.isfinite(arr)):
        raise DocumentError(f"expected a finite {length}-vector")
    return arr


# -- points ------------------------------------------------------------------

def points_doc(points) -> dict:
    pts = [list(map(float, np.asarray(p, dtype=float).reshape(3))) for p in points]
    return {"kind": "points", "version": VERSION, "points": pts}


def parse_points(doc: dict) -> np.ndarray:
    check_document(doc, "points")
    try:
        return np.array([_vec(p, 3) for p in doc["points"]])
    except (KeyError, TypeError) as exc:
        raise DocumentError("malformed points document") from exc


# -- segments ----------------------------------------------------------------

def segments_doc(segments) -> dict:
    segs = []
    for s in segments:
        s = s if isinstance(s, Segment3) else Segment3(*s)
        segs.append([list(map(float, s.a)), list(map(float, s.b))])
    return {"kind": "segments", "version": VERSION, "segments": segs}


def parse_segments(doc: dict) -> list[Segment3]:
    check_document(doc, "segments")
    try:
        return [Segment3(_vec(pair[0], 3), _vec(pair[1], 3))
                for pair in doc["segments"]]
    except (KeyError, TypeError, IndexError, PreconditionError) as exc:
        raise DocumentError(f"malformed segments document: {exc}") from exc


# -- lines -------------------------------------------------------------------

def lines_doc(lines, extras=None) -> dict:
    entries = []
    for i, line in enumerate(lines):
        entry = {"point": list(map(float, line.point)),
                 "direction": list(map(float, line.direction))}
        if extras is not None:
            entry.update(extras[i])
        entries.append(entry)
    return {"kind": "lines", "version": VERSION, "lines": entries}


def parse_lines(doc: dict) -> list[Line3]:
    check_document(doc, "lines")
    try:
        return [Line3(_vec(e["point"], 3), _vec(e["direction"], 3))
                for e in doc["lines"]]
    except (KeyError, TypeError, PreconditionError) as exc:
        raise DocumentError(f"malformed lines document: {exc}") from exc


# -- quadric -----------------------------------------------------------------

def quadric_doc(q: Quadric3, classification: str | None = None,
                residual: float | None = None) -> dict:
    doc = {"kind": "quadric", "version": VERSION,
           "coefficients": list(map(float, q.coefficients)),
           "monomials": ["x^2", "y^2", "z^2", "xy", "xz", "yz", "x", "y", "z", "1"]}
    if classification is not None:
        doc["classification"] = classification
    if residual is not None:
        doc["max_residual"] = float(residual)
    return doc


def parse_quadric(doc: dict) -> Quadric3:
    check_document(doc, "quadric")
    try:
        return Quadric3.from_coefficients(_vec(doc["coefficients"], 10))
    except (KeyError, TypeError, PreconditionError) as exc:
        raise DocumentError(f"malformed quadric document: {exc}") from exc


# -- flats (lists of point-spanned affine subspaces) --------------------------

def flats_doc(point_lists) -> dict:
    flats = [[list(map(float, np.asarray(p, dtype=float).reshape(-1)))
              for p in pts] for pts in point_lists]
    return {"kind": "flats", "version": VERSION, "flats": flats}


def parse_flats(doc: dict) -> list[np.ndarray]:
    check_document(doc, "flats")
    try:
        flats = [np.array([np.asarray(p, dtype=float).reshape(-1) for p in pts])
                 for pts in doc["flats"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError("malformed flats document") from exc
    if not flats or any(f.ndim != 2 or not np.all(np.isfinite(f)) for f in flats):
        raise DocumentError("malformed flats document")
    dims = {f.shape[1] for f in flats}
    if len(dims) != 1:
        raise DocumentError("flats must share one ambient dimension")
    return flats


# -- piecewise-linear map specs ------------------------------------------------

def pl_map_doc(spec: PLMapSpec) -> dict:
    return {"kind": "pl_map", "version": VERSION,
            "ambient_dim": spec.ambient_dim,
            "vertices": list(spec.vertices),
            "images": [list(map(float, row)) for row in spec.image_array],
            "simplices": [list(s) for s in spec.simplices],
            "marked": [[list(s) for s in sub] for sub in spec.marked]}


def parse_pl_map(doc: dict) -> PLMapSpec:
    check_document(doc, "pl_map")
    try:
        vertices = [str(v) for v in doc["vertices"]]
        m = int(doc["ambient_dim"])
        images = np.array([_vec(row, m) for row in doc["images"]])
        simplices = tuple(tuple(str(v) for v in s) for s in doc["simplices"])
        marked = tuple(tuple(tuple(str(v) for v in s) for s in sub)
                       for sub in doc["marked"])
        return PLMapSpec(tuple(vertices), simplices, marked, images)
    except (KeyError, TypeError, ValueError, PreconditionError) as exc:
        raise DocumentError(f"malformed pl_map document: {exc}") from exc


# -- certificates --------------------------------------------------------------

def certificate_doc(cert: GPCertificate, recomputed: int) -> dict:
    return {"kind": "gp_certificate", "version": VERSION,
            "case": cert.case, "m": cert.m, "n": cert.n,
            "d": cert.d, "delta": cert.delta, "seed": cert.seed,
            "hull_dims": list(cert.hull_dims),
            "skew_pairwise": [{"groups": list(pair), "skew": ok}
                              for pair, ok in cert.skew_pairwise],
            "skew_joint": cert.skew_joint,
            "bound": cert.bound,
            "recomputed_bound": recomputed,
            "transversal_counts": [
                {"simplices": [list(s) for s in quad], "count": count}
                for quad, count in cert.transversal_counts],
            "max_perturbation": cert.max_perturbation}
