"""Text formats for metrics, targets, traces and conformal factors; OBJ import.

Metric file::

    geometry euclidean
    nv 4
    e 0 1.0
    ...
    f 0 1 2 3 4 5

``e <id> <length>`` gives an edge length and ``f v0 v1 v2 e0 e1 e2`` a face,
``ek`` being the edge opposite ``vk``. Blank lines and ``#`` comments are
ignored. Floats are written with 17 significant digits so files round-trip.
"""

from __future__ import annotations

import csv
import io as _io
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import InadmissibleMetric, NonTriangleFace, ParseError
from .flow import TraceRecord
from .geometry import Geometry, PolyhedralMetric, admissibility
from .mesh import Triangulation, build_from_faces

__all__ = [
    "TRACE_COLUMNS",
    "atomic_write",
    "format_metric",
    "import_obj",
    "parse_metric",
    "read_metric",
    "read_target",
    "read_trace",
    "read_u",
    "write_metric",
    "write_trace",
    "write_u",
]

TRACE_COLUMNS = ("t", "dt", "calabi_energy", "max_abs_curv_err", "flips_step", "flips_cum", "sum_u")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def atomic_write(path, text: str) -> None:
    """Write ``text`` to a temporary file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _tokens(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _int(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {tok!r}", line=lineno) from None


def _float(tok: str, lineno: int, what: str) -> float:
    try:
        val = float(tok)
    except ValueError:
        raise ParseError(f"{what} must be a number, got {tok!r}", line=lineno) from None
    if not math.isfinite(val):
        raise ParseError(f"{what} must be finite", line=lineno)
    return val


def parse_metric(text: str, check_admissible: bool = True) -> tuple[Triangulation, PolyhedralMetric]:
    kind = None
    nv = None
    lengths: dict[int, float] = {}
    faces = []
    for lineno, tok in _tokens(text):
        key = tok[0]
        if key == "geometry":
            if len(tok) != 2 or tok[1] not in ("euclidean", "hyperbolic"):
                raise ParseError("expected 'geometry euclidean|hyperbolic'", line=lineno)
            kind = Geometry(tok[1])
        elif key == "nv":
            if len(tok) != 2:
                raise ParseError("expected 'nv <count>'", line=lineno)
            nv = _int(tok[1], lineno, "vertex count")
            if nv <= 0:
                raise ParseError("vertex count must be positive", line=lineno)
        elif key == "e":
            if len(tok) != 3:
                raise ParseError("expected 'e <edge-id> <length>'", line=lineno)
            e = _int(tok[1], lineno, "edge id")
            length = _float(tok[2], lineno, "edge length")
            if e < 0:
                raise ParseError("edge id must be non-negative", line=lineno)
            if length <= 0:
                raise ParseError(f"edge length must be positive, got {length}", line=lineno)
            if e in lengths:
                raise ParseError(f"edge {e} given twice", line=lineno)
            lengths[e] = length
        elif key == "f":
            if len(tok) != 7:
                raise ParseError("expected 'f v0 v1 v2 e0 e1 e2'", line=lineno)
            faces.append(tuple(_int(x, lineno, "face entry") for x in tok[1:]))
        else:
            raise ParseError(f"unknown record {key!r}", line=lineno)
    if kind is None:
        raise ParseError("missing 'geometry' header")
    if nv is None:
        raise ParseError("missing 'nv' line")
    if not faces:
        raise ParseError("no faces")
    n_edges = len(lengths)
    if sorted(lengths) != list(range(n_edges)):
        raise ParseError("edge ids must be 0..E-1 without gaps")
    used = {e for face in faces for e in face[3:]}
    if used != set(range(n_edges)):
        raise ParseError("faces reference edges that have no length line, or leave edges unused")
    tri = build_from_faces(faces, nv)
    metric = PolyhedralMetric(kind, np.array([lengths[e] for e in range(n_edges)]))
    if check_admissible:
        ok, bad = admissibility(tri, metric)
        if not ok:
            raise InadmissibleMetric(f"faces violate the triangle inequality: {bad}", faces=bad)
    return tri, metric


def read_metric(path, check_admissible: bool = True) -> tuple[Triangulation, PolyhedralMetric]:
    return parse_metric(Path(path).read_text(), check_admissible=check_admissible)


def format_metric(tri: Triangulation, metric: PolyhedralMetric) -> str:
    lines = [f"geometry {metric.kind.value}", f"nv {tri.n_vertices}"]
    lines += [f"e {e} {_fmt(x)}" for e, x in enumerate(metric.lengths)]
    for vs, es in zip(tri.face_vertices.tolist(), tri.face_edges.tolist()):
        lines.append("f " + " ".join(str(x) for x in vs + es))
    return "\n".join(lines) + "\n"


def write_metric(path, tri: Triangulation, metric: PolyhedralMetric) -> None:
    atomic_write(path, format_metric(tri, metric))


def read_target(path, n_vertices: int, default=math.nan) -> np.ndarray:
    """Values from ``k <vertex> <value>`` lines; missing vertices get ``default``."""
    K = np.full(n_vertices, default, dtype=np.float64)
    seen = set()
    for lineno, tok in _tokens(Path(path).read_text()):
        if tok[0] != "k" or len(tok) != 3:
            raise ParseError("expected 'k <vertex-id> <value>'", line=lineno)
        v = _int(tok[1], lineno, "vertex id")
        if not 0 <= v < n_vertices:
            raise ParseError(f"vertex {v} out of range", line=lineno)
        if v in seen:
            raise ParseError(f"vertex {v} given twice", line=lineno)
        seen.add(v)
        K[v] = _float(tok[2], lineno, "curvature")
    return K


def write_u(path, u) -> None:
    atomic_write(path, "".join(f"u {i} {_fmt(x)}\n" for i, x in enumerate(u)))


def read_u(path) -> np.ndarray:
    values = {}
    for lineno, tok in _tokens(Path(path).read_text()):
        if tok[0] != "u" or len(tok) != 3:
            raise ParseError("expected 'u <vertex-id> <value>'", line=lineno)
        values[_int(tok[1], lineno, "vertex id")] = _float(tok[2], lineno, "conformal factor")
    return np.array([values[i] for i in range(len(values))])


def write_trace(path, trace) -> None:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for r in trace:
        writer.writerow(
            [_fmt(r.t), _fmt(r.dt), _fmt(r.calabi_energy), _fmt(r.max_abs_curv_err),
             r.flips_step, r.flips_cum, _fmt(r.sum_u)]
        )
    atomic_write(path, buf.getvalue())


def read_trace(path) -> list[TraceRecord]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != TRACE_COLUMNS:
            raise ParseError(f"trace header must be {','.join(TRACE_COLUMNS)}", line=1)
        out = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(TRACE_COLUMNS):
                raise ParseError(f"expected {len(TRACE_COLUMNS)} columns", line=lineno)
            try:
                out.append(
                    TraceRecord(
                        float(row[0]), float(row[1]), float(row[2]), float(row[3]),
                        int(row[4]), int(row[5]), float(row[6]),
                    )
                )
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
    return out


def import_obj(path) -> tuple[Triangulation, PolyhedralMetric]:
    """Euclidean metric of a closed triangle mesh from an OBJ file.

    Only ``v`` and ``f`` records are read; edge lengths are the distances
    between the vertex positions.
    """
    positions = []
    faces = []
    for lineno, tok in _tokens(Path(path).read_text()):
        if tok[0] == "v":
            if len(tok) < 4:
                raise ParseError("vertex needs three coordinates", line=lineno)
            positions.append([_float(x, lineno, "coordinate") for x in tok[1:4]])
        elif tok[0] == "f":
            if len(tok) != 4:
                raise NonTriangleFace(f"line {lineno}: face has {len(tok) - 1} vertices")
            idx = []
            for x in tok[1:]:
                i = _int(x.split("/")[0], lineno, "face index")
                i = i - 1 if i > 0 else len(positions) + i
                if not 0 <= i < len(positions):
                    raise ParseError(f"face index {x} out of range", line=lineno)
                idx.append(i)
            faces.append(idx)
    if not faces:
        raise ParseError("no faces")
    pts = np.array(positions)
    tri = build_from_faces(faces, len(positions))
    ends = tri.edge_endpoints()
    lengths = np.linalg.norm(pts[ends[:, 0]] - pts[ends[:, 1]], axis=1)
    metric = PolyhedralMetric(Geometry.EUCLIDEAN, lengths)
    ok, bad = admissibility(tri, metric)
    if not ok:
        raise InadmissibleMetric(f"degenerate faces in OBJ: {bad}", faces=bad)
    return tri, metric
