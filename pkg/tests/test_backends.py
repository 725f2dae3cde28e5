import os
import subprocess
import sys

import numpy as np
import pytest

from calabiflow import kernels
from calabiflow.geometry import face_lengths
from calabiflow.surfaces import genus2_octagon_surface, grid_torus

BACKENDS = kernels.available_backends()
needs_both = pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled extension not built")


def test_python_fallback_always_available():
    assert "python" in BACKENDS
    assert kernels.BACKEND in BACKENDS


def test_environment_forces_fallback():
    env = dict(os.environ, CALABIFLOW_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import calabiflow; print(calabiflow.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


@needs_both
@pytest.mark.parametrize("hyperbolic", [False, True])
@pytest.mark.parametrize("surface", [grid_torus, genus2_octagon_surface])
def test_backends_agree(surface, hyperbolic, rng):
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    tri, m = surface()
    m.lengths *= np.exp(rng.uniform(-0.1, 0.1, tri.n_edges))
    fl = face_lengths(tri, m)
    a_py = py.face_angles(fl, hyperbolic)
    a_cy = np.asarray(cy.face_angles(fl, hyperbolic))
    np.testing.assert_allclose(a_cy, a_py, rtol=1e-14, atol=1e-15)
    n = tri.n_vertices
    np.testing.assert_allclose(cy.curvature(tri.face_vertices, a_py, n), py.curvature(tri.face_vertices, a_py, n), atol=1e-13)
    np.testing.assert_allclose(
        cy.edge_margins(tri.edge_sides, a_py, hyperbolic), py.edge_margins(tri.edge_sides, a_py, hyperbolic), atol=1e-13
    )
    if hyperbolic:
        L_py = py.hyperbolic_jacobian(tri.face_vertices, fl, a_py, n)
        L_cy = cy.hyperbolic_jacobian(tri.face_vertices, fl, a_py, n)
    else:
        L_py = py.cotan_jacobian(tri.face_vertices, a_py, n)
        L_cy = cy.cotan_jacobian(tri.face_vertices, a_py, n)
    np.testing.assert_allclose(L_cy, L_py, rtol=1e-12, atol=1e-12)
    for a, b, c in fl[:5]:
        np.testing.assert_allclose(cy.triangle_angles(a, b, c, hyperbolic), py.triangle_angles(a, b, c, hyperbolic), rtol=1e-15)


@needs_both
def test_backends_clamp_degenerate_faces_alike():
    fl = np.array([[1.0, 1.0, 2.5], [3.0, 1.0, 1.0], [1.0, 1.0, 1.0]])
    for hyperbolic in (False, True):
        np.testing.assert_array_equal(
            np.asarray(BACKENDS["cython"].face_angles(fl, hyperbolic))[:2],
            BACKENDS["python"].face_angles(fl, hyperbolic)[:2],
        )
