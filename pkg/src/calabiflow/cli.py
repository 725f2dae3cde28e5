"""Command line entry point: ``calabiflow <subcommand> ...``.

Exit status is 0 on success, 1 on any error and 2 when a flow does not
converge. Errors are printed on standard error as ``error: <reason>: <text>``.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import io
from .errors import CalabiFlowError, NotConverged, StepCollapse
from .flow import FlowConfig, decay_fit, make_delaunay, run_flow
from .geometry import curvature, delaunay_margins, gauss_bonnet_residual

EXIT_OK, EXIT_ERROR, EXIT_NOT_CONVERGED = 0, 1, 2


def _cmd_validate(args) -> int:
    tri, metric = io.read_metric(args.metric)
    print(f"geometry {metric.kind.value}")
    print(f"chi {tri.euler_characteristic()}")
    print(f"n {tri.n_vertices}")
    print(f"E {tri.n_edges}")
    print(f"F {tri.n_faces}")
    print(f"gauss_bonnet_residual {gauss_bonnet_residual(tri, metric):.3e}")
    return EXIT_OK


def _cmd_curvature(args) -> int:
    tri, metric = io.read_metric(args.metric)
    K = curvature(tri, metric)
    for i, k in enumerate(K):
        print(f"k {i} {k:.17g}")
    print(f"sum {K.sum():.17g}")
    return EXIT_OK


def _cmd_delaunay(args) -> int:
    tri, metric = io.read_metric(args.metric)
    margins = delaunay_margins(tri, metric)
    bad = np.flatnonzero(margins < -args.eps)
    for e in bad:
        print(f"non_delaunay {e} margin {margins[e]:.6e}")
    if args.fix:
        if not args.out:
            raise CalabiFlowError("--fix requires --out")
        flips = make_delaunay(tri, metric, args.eps)
        io.write_metric(args.out, tri, metric)
        print(f"flips {flips}")
    return EXIT_OK


def _target(args, tri, metric) -> np.ndarray:
    n = tri.n_vertices
    chi = tri.euler_characteristic()
    if args.constant:
        if metric.kind.hyperbolic:
            if chi >= 0:
                raise CalabiFlowError(
                    f"--constant with hyperbolic geometry needs chi < 0, surface has chi = {chi}"
                )
            return np.zeros(n)
        return np.full(n, 2.0 * math.pi * chi / n)
    K = io.read_target(args.target, n)
    missing = np.isnan(K)
    if missing.any():
        if metric.kind.hyperbolic:
            K[missing] = 0.0
        else:
            K[missing] = (2.0 * math.pi * chi - K[~missing].sum()) / missing.sum()
    return K


def _cmd_flow(args) -> int:
    tri, metric = io.read_metric(args.metric)
    target = _target(args, tri, metric)
    cfg = FlowConfig(
        tol_curv=args.tol,
        dt_init=args.dt,
        dt_max=max(args.dt, FlowConfig.dt_max),
        t_max=args.t_max,
    )
    status = EXIT_OK
    try:
        result = run_flow(tri, metric, target, cfg)
    except NotConverged as exc:
        result = exc.result
        status = EXIT_NOT_CONVERGED
        print(f"error: {exc.reason}: {exc}", file=sys.stderr)
    except StepCollapse as exc:
        result = exc.details.get("result")
        if result is not None and args.trace:
            io.write_trace(args.trace, result.trace)
        raise
    state = result.state
    if args.trace:
        io.write_trace(args.trace, result.trace)
    if args.out:
        io.write_metric(args.out, state.tri, state.metric)
        io.write_u(args.u_out or f"{args.out}.u", state.u)
    last = result.trace[-1]
    print(f"converged {str(result.converged).lower()}")
    print(f"t {state.t:.6g}")
    print(f"steps {len(result.trace) - 1}")
    print(f"flips {state.cumulative_flips}")
    print(f"max_abs_curv_err {last.max_abs_curv_err:.3e}")
    return status


def _cmd_decay(args) -> int:
    trace = io.read_trace(args.trace)
    slope, r2 = decay_fit(trace)
    print(f"decay_rate {slope:.17g}")
    print(f"r_squared {r2:.6f}")
    return EXIT_OK


def _cmd_import_obj(args) -> int:
    tri, metric = io.import_obj(args.obj)
    io.write_metric(args.out, tri, metric)
    print(f"n {tri.n_vertices} E {tri.n_edges} F {tri.n_faces} chi {tri.euler_characteristic()}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="calabiflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="structural and admissibility checks")
    p.add_argument("metric")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("curvature", help="print the curvature at every vertex")
    p.add_argument("metric")
    p.set_defaults(func=_cmd_curvature)

    p = sub.add_parser("delaunay", help="list non-Delaunay edges, optionally fix them")
    p.add_argument("metric")
    p.add_argument("--fix", action="store_true")
    p.add_argument("--out")
    p.add_argument("--eps", type=float, default=1e-12)
    p.set_defaults(func=_cmd_delaunay)

    p = sub.add_parser("flow", help="run the Calabi flow with surgery")
    p.add_argument("metric")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--target", help="file of 'k <vertex> <value>' lines")
    group.add_argument("--constant", action="store_true", help="constant curvature target")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--dt", type=float, default=1e-2)
    p.add_argument("--t-max", type=float, default=1e3)
    p.add_argument("--trace", help="CSV trace output")
    p.add_argument("--out", help="final metric output")
    p.add_argument("--u-out", help="final conformal factor output (default: <out>.u)")
    p.set_defaults(func=_cmd_flow)

    p = sub.add_parser("decay", help="exponential decay rate of a trace")
    p.add_argument("trace")
    p.set_defaults(func=_cmd_decay)

    p = sub.add_parser("import-obj", help="convert a triangle OBJ mesh to a metric file")
    p.add_argument("obj")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_import_obj)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors; 2 means "not converged" here
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return args.func(args)
    except CalabiFlowError as exc:
        print(f"error: {exc.reason}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: io_error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
