"""Backend selection for the per-face kernels.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``CALABIFLOW_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the numpy implementation is used. Both expose the same
functions.
"""

import os

from . import _pykernels

_forced = os.environ.get("CALABIFLOW_PURE_PYTHON", "") not in ("", "0")

if _forced:
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
        BACKEND = "python"

triangle_angles = _impl.triangle_angles
face_angles = _impl.face_angles
curvature = _impl.curvature
edge_margins = _impl.edge_margins
cotan_jacobian = _impl.cotan_jacobian
hyperbolic_jacobian = _impl.hyperbolic_jacobian


def available_backends():
    """Map backend name to module for every implementation importable here."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
