"""Small closed surfaces used by tests, benchmarks and documentation."""

from __future__ import annotations

import math

import numpy as np

from .geometry import Geometry, PolyhedralMetric
from .mesh import build_from_faces


def tetrahedron(length: float = 1.0, kind=Geometry.EUCLIDEAN):
    """Boundary of a regular tetrahedron (simplicial sphere, 4 vertices)."""
    tri = build_from_faces([(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)], 4)
    return tri, PolyhedralMetric(kind, np.full(tri.n_edges, float(length)))


def one_vertex_torus(a: float = 1.0, b: float = 1.0, c: float = math.sqrt(2.0)):
    """Two triangles, one vertex, three edges; ``c`` (edge 2) is the diagonal."""
    tri = build_from_faces([(0, 0, 0, 0, 1, 2), (0, 0, 0, 0, 1, 2)], 1)
    return tri, PolyhedralMetric(Geometry.EUCLIDEAN, np.array([a, b, c], dtype=float))


def pillow(length: float = 1.0, kind=Geometry.HYPERBOLIC):
    """Two equilateral triangles glued along all three edges (sphere, 3 vertices)."""
    tri = build_from_faces([(0, 1, 2), (0, 2, 1)], 3)
    return tri, PolyhedralMetric(kind, np.full(tri.n_edges, float(length)))


def grid_torus(m: int = 3, n: int = 3):
    """Flat unit-square torus split along one diagonal family (``m * n`` vertices)."""
    if m < 3 or n < 3:
        raise ValueError("need m, n >= 3 for a simplicial grid torus")

    def vid(i, j):
        return (i % m) * n + (j % n)

    faces = []
    for i in range(m):
        for j in range(n):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            faces += [(a, b, c), (a, c, d)]
    tri = build_from_faces(faces, m * n)
    ends = tri.edge_endpoints()
    lengths = np.empty(tri.n_edges)
    for e, (p, q) in enumerate(ends):
        di = abs(p // n - q // n)
        dj = abs(p % n - q % n)
        lengths[e] = math.sqrt(2.0) if (di and dj) else 1.0
    return tri, PolyhedralMetric(Geometry.EUCLIDEAN, lengths)


def genus2_octagon_surface(kind=Geometry.HYPERBOLIC, length: float = 2.0):
    """Genus-two surface from a regular octagon with one vertex plus a center.

    The octagon a b a^-1 b^-1 c d c^-1 d^-1 is coned from its center, giving
    2 vertices, 12 edges and 8 faces (chi = -2). All edges get ``length``.
    """
    # boundary edge ids 0..3 are a, b, c, d; spokes 4..11 join the center (vertex 1)
    # to octagon corner s. Inverse letters need no marking: oriented faces
    # traverse the two copies of a side in opposite directions.
    sides = [0, 1, 0, 1, 2, 3, 2, 3]
    faces = []
    for s in range(8):
        spoke_a, spoke_b = 4 + s, 4 + (s + 1) % 8
        # corners: center, octagon corner s, octagon corner s+1
        faces.append((1, 0, 0, sides[s], spoke_b, spoke_a))
    tri = build_from_faces(faces, 2)
    return tri, PolyhedralMetric(kind, np.full(tri.n_edges, float(length)))


__all__ = ["genus2_octagon_surface", "grid_torus", "one_vertex_torus", "pillow", "tetrahedron"]
