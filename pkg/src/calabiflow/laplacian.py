"""Curvature Jacobian ``L = dK/du`` and the discrete Laplace operators ``-L``.

Matrices are dense ``(n, n)`` numpy arrays.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import linalg

from . import kernels
from .errors import DegenerateTriangle, DimensionMismatch
from .geometry import PolyhedralMetric, face_angles, face_lengths, triangle_angles
from .mesh import Triangulation

__all__ = [
    "apply_laplacian",
    "cotan_weight",
    "jacobian",
    "jacobian_euclidean",
    "jacobian_hyperbolic",
    "min_eigenvalue",
    "smallest_eigenvalues",
]


def cotan_weight(tri: Triangulation, metric: PolyhedralMetric, e: int) -> float:
    """Sum of the cotangents of the two angles facing edge ``e``."""
    total = 0.0
    for f, c in tri.edge_sides[e]:
        angle = triangle_angles(metric.kind, *metric.lengths[tri.face_edges[f]])[c]
        if angle <= 0.0 or angle >= math.pi:
            raise DegenerateTriangle(f"angle {angle} facing edge {e}")
        total += 1.0 / math.tan(angle)
    return total


def jacobian_euclidean(tri: Triangulation, metric: PolyhedralMetric) -> np.ndarray:
    """Cotangent matrix: off-diagonal ``-sum`` of weights, rows summing to zero."""
    angles = face_angles(tri, metric)
    return kernels.cotan_jacobian(tri.face_vertices, angles, tri.n_vertices)


def jacobian_hyperbolic(tri: Triangulation, metric: PolyhedralMetric) -> np.ndarray:
    """Chain rule through the hyperbolic law of cosines and ``dl/du = 2 tanh(l/2)``."""
    angles = face_angles(tri, metric)
    return kernels.hyperbolic_jacobian(
        tri.face_vertices, face_lengths(tri, metric), angles, tri.n_vertices
    )


def jacobian(tri: Triangulation, metric: PolyhedralMetric) -> np.ndarray:
    if metric.kind.hyperbolic:
        return jacobian_hyperbolic(tri, metric)
    return jacobian_euclidean(tri, metric)


def apply_laplacian(L: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Discrete Laplacian of a vertex function, ``-L f``."""
    f = np.asarray(f, dtype=np.float64)
    if L.ndim != 2 or L.shape[0] != L.shape[1] or f.shape != (L.shape[0],):
        raise DimensionMismatch(f"matrix {L.shape} against vector {f.shape}")
    return -(L @ f)


def smallest_eigenvalues(L: np.ndarray, k: int = 2) -> np.ndarray:
    """The ``k`` smallest eigenvalues of the symmetric part of ``L``, ascending."""
    n = L.shape[0]
    k = min(k, n)
    sym = 0.5 * (L + L.T)
    return linalg.eigvalsh(sym, subset_by_index=[0, k - 1])


def min_eigenvalue(L: np.ndarray) -> float:
    return float(smallest_eigenvalues(L, 1)[0])
