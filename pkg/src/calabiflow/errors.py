"""Exception hierarchy.

Every error carries a short machine-readable ``reason`` string which the
command line prints on standard error.
"""


class CalabiFlowError(Exception):
    reason = "error"

    def __init__(self, message="", **details):
        super().__init__(message or self.reason)
        self.details = details


class OpenSurface(CalabiFlowError):
    reason = "open_surface"


class NonManifoldEdge(CalabiFlowError):
    reason = "non_manifold_edge"


class AmbiguousEdges(CalabiFlowError):
    reason = "ambiguous_edges"


class InvalidGluing(CalabiFlowError):
    reason = "invalid_gluing"


class NonOrientable(CalabiFlowError):
    reason = "non_orientable"


class UnflippableSelfGlued(CalabiFlowError):
    reason = "unflippable_self_glued"


class DegenerateTriangle(CalabiFlowError):
    reason = "degenerate_triangle"


class FlipProducesDegenerate(CalabiFlowError):
    reason = "flip_produces_degenerate"


class InadmissibleMetric(CalabiFlowError):
    reason = "inadmissible_metric"


class DimensionMismatch(CalabiFlowError):
    reason = "dimension_mismatch"


class InadmissibleTarget(CalabiFlowError):
    reason = "inadmissible_target"


class FlipBudgetExceeded(CalabiFlowError):
    reason = "flip_budget_exceeded"


class StepCollapse(CalabiFlowError):
    reason = "step_collapse"


class NotConverged(CalabiFlowError):
    reason = "not_converged"

    def __init__(self, message="", result=None, **details):
        super().__init__(message, **details)
        self.result = result


class InsufficientTrace(CalabiFlowError):
    reason = "insufficient_trace"


class ParseError(CalabiFlowError):
    reason = "parse_error"

    def __init__(self, message="", line=None, **details):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, line=line, **details)
        self.line = line


class NonTriangleFace(CalabiFlowError):
    reason = "non_triangle_face"
