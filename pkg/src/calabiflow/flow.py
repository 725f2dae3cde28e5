"""Combinatorial Calabi flow with surgery by Delaunay flips.

The flow ``du/dt = -L (K - K*)`` is integrated by explicit Euler steps with a
backtracking rule that only accepts steps lowering the Calabi energy
``sum (K - K*)^2``. The triangulation is kept Delaunay throughout.

Inside a step the conformal factor moves along a straight segment. When an
edge reaches the Delaunay tie on that segment the step is paused there, the
edge is flipped, and the remainder of the segment is applied in the new
triangulation. At a tie the quad is inscribed, so the isometric flip agrees
with the Ptolemy relation and the metric stays in the discrete conformal
class of the starting metric. Flipping only after the whole step would leave
the class by an amount proportional to the overshoot.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .errors import (
    DegenerateTriangle,
    FlipBudgetExceeded,
    FlipProducesDegenerate,
    InadmissibleMetric,
    InadmissibleTarget,
    InsufficientTrace,
    NotConverged,
    StepCollapse,
)
from .geometry import (
    EPS_DEL,
    Geometry,
    PolyhedralMetric,
    admissibility,
    curvature,
    delaunay_margins,
    flip_edge,
    vertex_scale,
)
from .laplacian import jacobian, smallest_eigenvalues
from .mesh import Triangulation

__all__ = [
    "FlowConfig",
    "FlowResult",
    "FlowState",
    "TraceRecord",
    "calabi_energy",
    "decay_fit",
    "estimate_decay_rate",
    "flow_step",
    "flow_velocity",
    "make_delaunay",
    "run_flow",
    "scale_with_surgery",
    "validate_target",
]

log = logging.getLogger(__name__)

TARGET_SUM_TOL = 1e-9


@dataclass
class FlowConfig:
    dt_init: float = 1e-2
    dt_min: float = 1e-8
    dt_max: float = 1.0
    tol_curv: float = 1e-10
    t_max: float = 1e3
    backtrack_factor: float = 0.5
    grow_factor: float = 1.2
    max_flips_per_sweep: Optional[int] = None  # None means 100 * number of edges
    eps_del: float = EPS_DEL
    max_steps: int = 200_000
    record_spectrum: bool = False
    # cap dt at stability_fraction / ||L||^2 (Gershgorin bound); None disables
    stability_fraction: Optional[float] = 0.5
    # "event": flip at the exact tie inside a step; "post_step": Lawson sweep after the step
    surgery: str = "event"

    def __post_init__(self):
        if not (0 < self.dt_min <= self.dt_init <= self.dt_max):
            raise ValueError("need 0 < dt_min <= dt_init <= dt_max")
        if not self.tol_curv > 0:
            raise ValueError("tol_curv must be positive")
        if not 0 < self.backtrack_factor < 1:
            raise ValueError("backtrack_factor must lie in (0, 1)")
        if not self.grow_factor > 1:
            raise ValueError("grow_factor must exceed 1")
        if self.surgery not in ("event", "post_step"):
            raise ValueError("surgery must be 'event' or 'post_step'")

    def flip_budget(self, tri: Triangulation) -> int:
        if self.max_flips_per_sweep is None:
            return 100 * tri.n_edges
        return self.max_flips_per_sweep


@dataclass
class FlowState:
    tri: Triangulation
    metric: PolyhedralMetric
    u: np.ndarray
    target: np.ndarray
    t: float = 0.0
    dt: float = 1e-2
    cumulative_flips: int = 0

    def copy(self) -> "FlowState":
        return replace(self, tri=self.tri.copy(), metric=self.metric.copy(), u=self.u.copy())

    @property
    def kind(self) -> Geometry:
        return self.metric.kind


class TraceRecord(NamedTuple):
    t: float
    dt: float
    calabi_energy: float
    max_abs_curv_err: float
    flips_step: int
    flips_cum: int
    sum_u: float
    min_eig: float = math.nan


@dataclass
class FlowResult:
    state: FlowState
    trace: list[TraceRecord] = field(default_factory=list)
    converged: bool = False


def validate_target(kind: Geometry, tri: Triangulation, target) -> np.ndarray:
    """Check a prescribed curvature and return it as an array.

    Euclidean targets must sum to ``2 pi chi``; a discrepancy up to 1e-9 is
    removed by a uniform shift. Hyperbolic targets must sum to more than
    ``2 pi chi``. Every entry must be below ``2 pi``.
    """
    kind = Geometry(kind)
    K = np.array(target, dtype=np.float64)
    if K.shape != (tri.n_vertices,):
        raise InadmissibleTarget(f"target has {K.size} values for {tri.n_vertices} vertices")
    if not np.all(np.isfinite(K)):
        raise InadmissibleTarget("target values must be finite")
    high = np.flatnonzero(K >= 2.0 * math.pi)
    if high.size:
        raise InadmissibleTarget(f"target curvature must be < 2pi; violated at vertices {high.tolist()}")
    total = 2.0 * math.pi * tri.euler_characteristic()
    if kind.hyperbolic:
        if not K.sum() > total:
            raise InadmissibleTarget(
                f"hyperbolic target sum {K.sum():.17g} must exceed 2*pi*chi = {total:.17g}"
            )
        return K
    gap = K.sum() - total
    if abs(gap) > TARGET_SUM_TOL:
        raise InadmissibleTarget(f"euclidean target sum {K.sum():.17g} must equal 2*pi*chi = {total:.17g}")
    K -= gap / K.size
    if np.any(K >= 2.0 * math.pi):
        raise InadmissibleTarget("target curvature must be < 2pi")
    return K


def make_delaunay(
    tri: Triangulation,
    metric: PolyhedralMetric,
    eps_del: float = EPS_DEL,
    max_flips: Optional[int] = None,
) -> int:
    """Lawson flips in place until every edge is Delaunay; returns the flip count.

    Scans edges in ascending id and restarts after each flip.
    """
    if max_flips is None:
        max_flips = 100 * tri.n_edges
    flips = 0
    while True:
        margins = delaunay_margins(tri, metric)
        bad = np.flatnonzero(margins < -eps_del)
        if bad.size == 0:
            return flips
        if flips >= max_flips:
            raise FlipBudgetExceeded(f"more than {max_flips} flips in one Delaunay sweep")
        flip_edge(tri, metric, int(bad[0]))
        flips += 1


def _warn_self_glued(tri: Triangulation) -> None:
    glued = np.flatnonzero(tri.edge_sides[:, 0, 0] == tri.edge_sides[:, 1, 0])
    if glued.size:
        log.warning(
            "edges %s are glued to themselves; treated as Delaunay and never flipped",
            glued.tolist(),
        )


def _edge_margin_scaled(tri: Triangulation, metric: PolyhedralMetric, e: int, du: np.ndarray) -> float:
    """Delaunay margin of edge ``e`` after scaling by ``du`` (clamped angles)."""
    hyperbolic = metric.kind.hyperbolic
    fv, fe, L = tri.face_vertices, tri.face_edges, metric.lengths
    angles = []
    for f, _ in tri.edge_sides[e]:
        lengths = []
        for c in range(3):
            x = du[fv[f, (c + 1) % 3]] + du[fv[f, (c + 2) % 3]]
            if hyperbolic:
                lengths.append(2.0 * math.asinh(math.exp(x) * math.sinh(0.5 * L[fe[f, c]])))
            else:
                lengths.append(L[fe[f, c]] * math.exp(x))
        angles.append(kernels.triangle_angles(lengths[0], lengths[1], lengths[2], hyperbolic))
    (_, c0), (_, c1) = tri.edge_sides[e]
    facing = angles[0][c0] + angles[1][c1]
    if hyperbolic:
        return sum(angles[0]) + sum(angles[1]) - 2.0 * facing
    return math.pi - facing


def scale_with_surgery(
    tri: Triangulation,
    metric: PolyhedralMetric,
    du: np.ndarray,
    eps_del: float = EPS_DEL,
    max_flips: Optional[int] = None,
) -> int:
    """Apply the conformal change ``du`` in place, flipping edges at their ties.

    ``tri`` must be Delaunay for ``metric`` on entry and is Delaunay on exit.
    Returns the number of flips performed.
    """
    if max_flips is None:
        max_flips = 100 * tri.n_edges
    du = np.asarray(du, dtype=np.float64)
    remaining = 1.0
    flips = make_delaunay(tri, metric, eps_del, max_flips)
    while True:
        step = remaining * du
        end, _ = vertex_scale(tri, metric, step)
        end_margins = delaunay_margins(tri, end, check=False)
        candidates = np.flatnonzero(end_margins < -eps_del)
        if candidates.size == 0:
            metric.lengths[:] = end.lengths
            return flips
        if flips >= max_flips:
            raise FlipBudgetExceeded(f"more than {max_flips} flips within one step")
        first_tau, first_edge = 2.0, -1
        for e in candidates.tolist():
            g = lambda s: _edge_margin_scaled(tri, metric, e, s * step)  # noqa: E731
            if g(0.0) <= 0.0:
                tau = 0.0
            elif g(1.0) >= 0.0:
                continue
            else:
                tau = brentq(g, 0.0, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)
            if tau < first_tau:
                first_tau, first_edge = tau, e
        if first_edge < 0:
            metric.lengths[:] = end.lengths
            return flips
        if first_tau > 0.0:
            mid, _ = vertex_scale(tri, metric, first_tau * step)
            metric.lengths[:] = mid.lengths
        remaining *= 1.0 - first_tau
        flip_edge(tri, metric, first_edge)
        flips += 1


def calabi_energy(K: np.ndarray, target: np.ndarray) -> float:
    return float(np.sum((K - target) ** 2))


def _velocity(state: FlowState, K: np.ndarray, L: np.ndarray) -> np.ndarray:
    v = -(L @ (K - state.target))
    if not state.kind.hyperbolic:
        v -= v.mean()  # exact in theory: the range of L is orthogonal to constants
    return v


def flow_velocity(state: FlowState) -> np.ndarray:
    """``du/dt = -L (K - K*)`` on the current Delaunay triangulation."""
    K = curvature(state.tri, state.metric)
    return _velocity(state, K, jacobian(state.tri, state.metric))


def _record(state: FlowState, dt: float, flips: int, cfg: FlowConfig) -> TraceRecord:
    K = curvature(state.tri, state.metric)
    err = K - state.target
    min_eig = math.nan
    if cfg.record_spectrum:
        min_eig = float(smallest_eigenvalues(jacobian(state.tri, state.metric), 1)[0])
    return TraceRecord(
        t=state.t,
        dt=dt,
        calabi_energy=float(np.sum(err**2)),
        max_abs_curv_err=float(np.max(np.abs(err))),
        flips_step=flips,
        flips_cum=state.cumulative_flips,
        sum_u=float(state.u.sum()),
        min_eig=min_eig,
    )


def _advance(trial: FlowState, du: np.ndarray, cfg: FlowConfig) -> int:
    budget = cfg.flip_budget(trial.tri)
    if cfg.surgery == "event":
        return scale_with_surgery(trial.tri, trial.metric, du, cfg.eps_del, budget)
    scaled, ok = vertex_scale(trial.tri, trial.metric, du)
    if not ok:
        raise DegenerateTriangle("step leaves the admissible space")
    trial.metric = scaled
    return make_delaunay(trial.tri, trial.metric, cfg.eps_del, budget)


def flow_step(state: FlowState, cfg: FlowConfig) -> tuple[FlowState, TraceRecord]:
    """One accepted explicit Euler step with energy backtracking.

    Starts from ``state.dt``, capped by ``stability_fraction / ||L||^2`` so
    the discrete trajectory follows the continuous flow, and shrinks by
    ``backtrack_factor`` until the step stays admissible and strictly lowers
    the Calabi energy. The returned state
    carries the grown step size for the next call.
    """
    K = curvature(state.tri, state.metric)
    L = jacobian(state.tri, state.metric)
    energy = calabi_energy(K, state.target)
    v = _velocity(state, K, L)
    if energy == 0.0 or not np.any(v):
        new = state.copy()
        new.t += state.dt
        return new, _record(new, state.dt, 0, cfg)

    dt = state.dt
    if cfg.stability_fraction is not None:
        bound = np.abs(L).sum(axis=1).max()
        dt = max(min(dt, cfg.stability_fraction / bound**2), cfg.dt_min)
    reason = ""
    while dt >= cfg.dt_min:
        trial = state.copy()
        du = dt * v
        try:
            flips = _advance(trial, du, cfg)
            new_energy = calabi_energy(curvature(trial.tri, trial.metric), trial.target)
        except (DegenerateTriangle, FlipProducesDegenerate) as exc:
            reason = f"{exc.reason}: {exc}"
            dt *= cfg.backtrack_factor
            continue
        if new_energy < energy:
            trial.u = state.u + du
            trial.t = state.t + dt
            trial.cumulative_flips = state.cumulative_flips + flips
            trial.dt = min(dt * cfg.grow_factor, cfg.dt_max)
            return trial, _record(trial, dt, flips, cfg)
        reason = f"energy did not decrease ({new_energy:.6g} >= {energy:.6g})"
        dt *= cfg.backtrack_factor
    raise StepCollapse(f"no acceptable step above dt_min={cfg.dt_min}: {reason}", t=state.t)


def run_flow(
    tri: Triangulation,
    metric: PolyhedralMetric,
    target,
    cfg: Optional[FlowConfig] = None,
    callback: Optional[Callable[[FlowState, TraceRecord], None]] = None,
) -> FlowResult:
    """Flow from ``metric`` until ``max |K - K*| < tol_curv``.

    Inputs are copied. The initial triangulation is made Delaunay first and
    those flips are counted in the first trace record. ``callback`` receives
    every recorded state. Raises :class:`NotConverged` (with the partial
    result attached) when ``t_max`` or ``max_steps`` is reached.
    """
    cfg = cfg or FlowConfig()
    tri = tri.copy()
    metric = metric.copy()
    ok, faces = admissibility(tri, metric)
    if not ok:
        raise InadmissibleMetric(f"faces violate the triangle inequality: {faces}", faces=faces)
    K_target = validate_target(metric.kind, tri, target)
    _warn_self_glued(tri)
    flips = make_delaunay(tri, metric, cfg.eps_del, cfg.flip_budget(tri))
    state = FlowState(
        tri=tri,
        metric=metric,
        u=np.zeros(tri.n_vertices),
        target=K_target,
        dt=cfg.dt_init,
        cumulative_flips=flips,
    )
    record = _record(state, 0.0, flips, cfg)
    result = FlowResult(state, [record])
    if callback:
        callback(state, record)
    steps = 0
    while record.max_abs_curv_err >= cfg.tol_curv:
        if state.t >= cfg.t_max or steps >= cfg.max_steps:
            raise NotConverged(
                f"max |K - K*| = {record.max_abs_curv_err:.3g} at t = {state.t:.6g}",
                result=result,
            )
        try:
            state, record = flow_step(state, cfg)
        except StepCollapse as exc:
            exc.details["result"] = result
            raise
        steps += 1
        result.state = state
        result.trace.append(record)
        if callback:
            callback(state, record)
    result.converged = True
    return result


def decay_fit(trace, fraction: float = 0.5) -> tuple[float, float]:
    """Least-squares fit of ``ln C`` against ``t`` over the last part of a trace.

    Returns ``(slope, r_squared)``. Only records with positive energy count;
    at least ten are required.
    """
    pts = [(r.t, r.calabi_energy) for r in trace if r.calabi_energy > 0]
    if len(pts) < 10:
        raise InsufficientTrace(f"{len(pts)} records with positive energy; need at least 10")
    pts = pts[int(len(pts) * (1.0 - fraction)) :]
    t = np.array([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    if np.ptp(t) == 0:
        raise InsufficientTrace("trace spans no time")
    slope, intercept = np.polyfit(t, y, 1)
    resid = y - (slope * t + intercept)
    total = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / total if total > 0 else 1.0
    return float(slope), float(r2)


def estimate_decay_rate(trace) -> float:
    """Slope of ``ln C`` against ``t`` over the last half of the trace."""
    return decay_fit(trace)[0]
