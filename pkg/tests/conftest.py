import math

import numpy as np
import pytest

from calabiflow import kernels
from calabiflow.geometry import Geometry, PolyhedralMetric
from calabiflow.mesh import build_from_faces
from calabiflow.surfaces import grid_torus, one_vertex_torus, pillow, tetrahedron

KERNEL_FUNCS = (
    "triangle_angles",
    "face_angles",
    "curvature",
    "edge_margins",
    "cotan_jacobian",
    "hyperbolic_jacobian",
)

_criteria: dict[int, tuple[str, str]] = {}
_details: dict[int, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    failed = report.failed
    if report.when == "call" or failed:
        prev = _criteria.get(number, (title, "PASS"))[1]
        status = "FAIL" if failed or prev == "FAIL" else "PASS"
        if report.when == "call" and report.skipped:
            status = "SKIP"
        _criteria[number] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, status = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {title}")
        for line in _details.get(number, []):
            terminalreporter.write_line(f"    {line}")


@pytest.fixture
def detail(request):
    """Attach a measured value to the acceptance summary of the current criterion."""
    marker = request.node.get_closest_marker("criterion")
    number = marker.args[0] if marker else 0

    def add(line):
        _details.setdefault(number, []).append(line)

    return add


@pytest.fixture(params=sorted(kernels.available_backends()))
def backend(request, monkeypatch):
    """Run the test once per importable kernel implementation."""
    module = kernels.available_backends()[request.param]
    for name in KERNEL_FUNCS:
        monkeypatch.setattr(kernels, name, getattr(module, name))
    return request.param


@pytest.fixture
def tetra():
    return tetrahedron()


@pytest.fixture
def square_torus():
    return one_vertex_torus(1.0, 1.0, math.sqrt(2.0))


@pytest.fixture
def skewed_torus():
    return one_vertex_torus(1.0, 1.0, 1.6)


@pytest.fixture
def hyp_pillow():
    return pillow(1.0, Geometry.HYPERBOLIC)


def random_metric(tri, kind, rng, low=1.0, high=1.5):
    """Lengths drawn from [low, high]; with high < 2 low every face is valid."""
    return PolyhedralMetric(kind, rng.uniform(low, high, tri.n_edges))


CONNECTIVITIES = {
    "tetrahedron": lambda: tetrahedron()[0],
    "torus": lambda: one_vertex_torus()[0],
    "pillow": lambda: pillow()[0],
    "grid_torus": lambda: grid_torus(3, 3)[0],
}


def two_square_pillow():
    """Sphere from two squares glued along their boundary, split by crossing diagonals."""
    return build_from_faces([(0, 1, 2), (0, 2, 3), (1, 0, 3), (1, 3, 2)], 4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
