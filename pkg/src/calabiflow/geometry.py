"""Triangle geometry, curvature, Delaunay predicates and vertex scaling.

Lengths are geodesic edge lengths in either background geometry. Angles,
curvature and margins are computed face by face through :mod:`.kernels`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateTriangle, FlipProducesDegenerate
from .mesh import Triangulation

__all__ = [
    "EPS_DEL",
    "EPS_TRI",
    "Geometry",
    "PolyhedralMetric",
    "admissibility",
    "curvature",
    "delaunay_margins",
    "face_angles",
    "face_lengths",
    "flip_edge",
    "flip_length",
    "gauss_bonnet_residual",
    "is_delaunay_edge",
    "non_delaunay_edges",
    "total_area",
    "triangle_angles",
    "triangle_area",
    "vertex_scale",
]

EPS_TRI = 1e-12
EPS_DEL = 1e-12


class Geometry(enum.Enum):
    EUCLIDEAN = "euclidean"
    HYPERBOLIC = "hyperbolic"

    @property
    def hyperbolic(self) -> bool:
        return self is Geometry.HYPERBOLIC

    @property
    def gauss_bonnet_lambda(self) -> int:
        """Curvature sign in ``sum K = 2 pi chi - lambda * area``."""
        return -1 if self is Geometry.HYPERBOLIC else 0


@dataclass
class PolyhedralMetric:
    kind: Geometry
    lengths: np.ndarray

    def __post_init__(self):
        self.kind = Geometry(self.kind)
        self.lengths = np.asarray(self.lengths, dtype=np.float64)

    def copy(self) -> "PolyhedralMetric":
        return PolyhedralMetric(self.kind, self.lengths.copy())


def _relative_margin(a, b, c):
    return min(b + c - a, a + c - b, a + b - c) / max(a, b, c)


def triangle_angles(kind: Geometry, a: float, b: float, c: float) -> tuple[float, float, float]:
    """Inner angles (alpha, beta, gamma), alpha opposite side ``a``."""
    kind = Geometry(kind)
    if min(a, b, c) <= 0 or not math.isfinite(a + b + c) or _relative_margin(a, b, c) <= EPS_TRI:
        raise DegenerateTriangle(f"lengths ({a}, {b}, {c}) do not bound a triangle")
    return kernels.triangle_angles(float(a), float(b), float(c), kind.hyperbolic)


def triangle_area(kind: Geometry, a: float, b: float, c: float) -> float:
    kind = Geometry(kind)
    angles = triangle_angles(kind, a, b, c)
    if kind.hyperbolic:
        return math.pi - sum(angles)
    s = 0.5 * (a + b + c)
    return math.sqrt(s * (0.5 * (b + c - a)) * (0.5 * (a + c - b)) * (0.5 * (a + b - c)))


def face_lengths(tri: Triangulation, metric: PolyhedralMetric) -> np.ndarray:
    """(F, 3) lengths; column ``c`` is the edge opposite corner ``c``."""
    return metric.lengths[tri.face_edges]


def admissibility(tri: Triangulation, metric: PolyhedralMetric) -> tuple[bool, list[int]]:
    """Whether every face satisfies the strict triangle inequalities.

    Returns the flag and the ids of the violating faces.
    """
    fl = face_lengths(tri, metric)
    a, b, c = fl[:, 0], fl[:, 1], fl[:, 2]
    margin = np.minimum.reduce([b + c - a, a + c - b, a + b - c]) / fl.max(axis=1)
    bad = ~(margin > EPS_TRI) | ~np.all(fl > 0, axis=1) | ~np.all(np.isfinite(fl), axis=1)
    faces = np.flatnonzero(bad).tolist()
    return not faces, faces


def face_angles(tri: Triangulation, metric: PolyhedralMetric, check: bool = True) -> np.ndarray:
    """(F, 3) inner angles at each corner.

    With ``check`` a degenerate face raises; otherwise its angles are clamped
    to (pi, 0, 0), which is what margin probing along the flow needs.
    """
    if check:
        ok, faces = admissibility(tri, metric)
        if not ok:
            raise DegenerateTriangle(f"faces violate the triangle inequality: {faces}", faces=faces)
    return kernels.face_angles(face_lengths(tri, metric), metric.kind.hyperbolic)


def curvature(tri: Triangulation, metric: PolyhedralMetric) -> np.ndarray:
    """Per-vertex curvature ``2 pi`` minus the cone angle."""
    return kernels.curvature(tri.face_vertices, face_angles(tri, metric), tri.n_vertices)


def total_area(tri: Triangulation, metric: PolyhedralMetric) -> float:
    if metric.kind.hyperbolic:
        angles = face_angles(tri, metric)
        return float(np.sum(math.pi - angles.sum(axis=1)))
    ok, faces = admissibility(tri, metric)
    if not ok:
        raise DegenerateTriangle(f"faces violate the triangle inequality: {faces}", faces=faces)
    fl = face_lengths(tri, metric)
    a, b, c = fl[:, 0], fl[:, 1], fl[:, 2]
    s = 0.5 * (a + b + c)
    return float(np.sum(np.sqrt(s * 0.5 * (b + c - a) * 0.5 * (a + c - b) * 0.5 * (a + b - c))))


def gauss_bonnet_residual(tri: Triangulation, metric: PolyhedralMetric) -> float:
    """``sum K - 2 pi chi + lambda * area``; zero up to round-off."""
    K = curvature(tri, metric)
    lam = metric.kind.gauss_bonnet_lambda
    area = total_area(tri, metric) if lam else 0.0
    return float(K.sum() - 2.0 * math.pi * tri.euler_characteristic() + lam * area)


def delaunay_margins(tri: Triangulation, metric: PolyhedralMetric, check: bool = True) -> np.ndarray:
    """Per-edge Delaunay slack; an edge is Delaunay when its margin is >= -eps.

    Euclidean: ``pi`` minus the two angles facing the edge. Hyperbolic: the
    four remaining angles of the two faces minus the two facing angles.
    Self-glued edges get ``+inf``.
    """
    angles = face_angles(tri, metric, check=check)
    return kernels.edge_margins(tri.edge_sides, angles, metric.kind.hyperbolic)


def is_delaunay_edge(tri: Triangulation, metric: PolyhedralMetric, e: int, eps: float = EPS_DEL) -> bool:
    (f0, c0), (f1, c1) = tri.edge_sides[e]
    if f0 == f1:
        return True
    fl = metric.lengths[tri.face_edges[[f0, f1]]]
    t0 = triangle_angles(metric.kind, *fl[0])
    t1 = triangle_angles(metric.kind, *fl[1])
    facing = t0[c0] + t1[c1]
    if metric.kind.hyperbolic:
        margin = sum(t0) + sum(t1) - 2.0 * facing
    else:
        margin = math.pi - facing
    return margin >= -eps


def non_delaunay_edges(tri: Triangulation, metric: PolyhedralMetric, eps: float = EPS_DEL) -> list[int]:
    return np.flatnonzero(delaunay_margins(tri, metric) < -eps).tolist()


def flip_length(
    kind: Geometry,
    l_ik: float,
    l_il: float,
    l_jk: float,
    l_jl: float,
    angle_i: float,
    angle_j: float,
) -> float:
    """Length of the diagonal kl of the quad ikjl laid out across edge ij.

    ``angle_i`` and ``angle_j`` are the full quad angles at i and j, i.e. the
    sums of the two triangle angles there. The quad must be strictly convex
    at both ends of the old diagonal.
    """
    kind = Geometry(kind)
    if not (angle_i < math.pi and angle_j < math.pi):
        raise FlipProducesDegenerate(
            f"quad is not convex (angles {angle_i:.17g}, {angle_j:.17g} at the old diagonal)"
        )
    s2 = math.sin(0.5 * angle_i) ** 2
    if kind.hyperbolic:
        half = math.sqrt(math.sinh(0.5 * (l_ik - l_il)) ** 2 + math.sinh(l_ik) * math.sinh(l_il) * s2)
        new = 2.0 * math.asinh(half)
    else:
        new = math.sqrt((l_ik - l_il) ** 2 + 4.0 * l_ik * l_il * s2)
    for a, b in ((l_ik, l_il), (l_jk, l_jl)):
        if not new > 0 or _relative_margin(a, b, new) <= EPS_TRI:
            raise FlipProducesDegenerate(f"new diagonal {new:.17g} degenerates a triangle")
    return new


def flip_edge(tri: Triangulation, metric: PolyhedralMetric, e: int) -> float:
    """Flip ``e`` in place, isometrically; returns the new length of ``e``."""
    (f0, c0), (f1, c1) = tri.edge_sides[e]
    if f0 == f1:
        tri.flip(e)  # raises UnflippableSelfGlued
    fe = tri.face_edges
    L = metric.lengths
    t0 = triangle_angles(metric.kind, *L[fe[f0]])
    t1 = triangle_angles(metric.kind, *L[fe[f1]])
    # first side reads (k, i, j), second side reads (l, j, i)
    angle_i = t0[(c0 + 1) % 3] + t1[(c1 + 2) % 3]
    angle_j = t0[(c0 + 2) % 3] + t1[(c1 + 1) % 3]
    l_ik = L[fe[f0, (c0 + 2) % 3]]
    l_jk = L[fe[f0, (c0 + 1) % 3]]
    l_il = L[fe[f1, (c1 + 1) % 3]]
    l_jl = L[fe[f1, (c1 + 2) % 3]]
    new = flip_length(metric.kind, l_ik, l_il, l_jk, l_jl, angle_i, angle_j)
    tri.flip(e)
    L[e] = new
    return new


def vertex_scale(
    tri: Triangulation, metric: PolyhedralMetric, du: np.ndarray
) -> tuple[PolyhedralMetric, bool]:
    """Scale every edge by the conformal factors of its endpoints.

    Euclidean lengths are multiplied by ``exp(du_i + du_j)``; hyperbolic
    lengths have ``sinh(l / 2)`` multiplied by the same factor. The result is
    returned together with its admissibility on ``tri``.
    """
    du = np.asarray(du, dtype=np.float64)
    ends = tri.edge_endpoints()
    factor = np.exp(du[ends[:, 0]] + du[ends[:, 1]])
    if metric.kind.hyperbolic:
        lengths = 2.0 * np.arcsinh(factor * np.sinh(0.5 * metric.lengths))
    else:
        lengths = metric.lengths * factor
    scaled = PolyhedralMetric(metric.kind, lengths)
    return scaled, admissibility(tri, scaled)[0]
