"""Discrete conformal metrics with prescribed curvature via the combinatorial
Calabi flow with Delaunay surgery, in Euclidean and hyperbolic background
geometry."""

from .errors import CalabiFlowError
from .flow import (
    FlowConfig,
    FlowResult,
    FlowState,
    TraceRecord,
    estimate_decay_rate,
    make_delaunay,
    run_flow,
    scale_with_surgery,
    validate_target,
)
from .geometry import (
    Geometry,
    PolyhedralMetric,
    admissibility,
    curvature,
    gauss_bonnet_residual,
    total_area,
    vertex_scale,
)
from .kernels import BACKEND
from .laplacian import apply_laplacian, jacobian
from .mesh import Triangulation, build_from_faces

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CalabiFlowError",
    "FlowConfig",
    "FlowResult",
    "FlowState",
    "Geometry",
    "PolyhedralMetric",
    "TraceRecord",
    "Triangulation",
    "admissibility",
    "apply_laplacian",
    "build_from_faces",
    "curvature",
    "estimate_decay_rate",
    "gauss_bonnet_residual",
    "jacobian",
    "make_delaunay",
    "run_flow",
    "scale_with_surgery",
    "total_area",
    "validate_target",
    "vertex_scale",
]
