"""Compare the compiled and numpy kernel backends.

Times each per-face kernel on a perturbed grid torus and one full flow run,
for every backend importable in this environment::

    python benchmarks/bench_kernels.py [--size 40] [--repeat 5]
"""

import argparse
import math
import timeit

import numpy as np

from calabiflow import kernels
from calabiflow.flow import make_delaunay, run_flow, scale_with_surgery
from calabiflow.geometry import face_lengths
from calabiflow.surfaces import grid_torus

FUNCS = ("triangle_angles", "face_angles", "curvature", "edge_margins", "cotan_jacobian", "hyperbolic_jacobian")


def use_backend(module):
    for name in FUNCS:
        setattr(kernels, name, getattr(module, name))


def perturbed_torus(size, seed=0):
    tri, m = grid_torus(size, size)
    u0 = np.random.default_rng(seed).uniform(-0.3, 0.3, tri.n_vertices)
    u0 -= u0.mean()
    scale_with_surgery(tri, m, u0)
    make_delaunay(tri, m)
    return tri, m


def best(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def bench_kernels(module, tri, m, repeat):
    fl = face_lengths(tri, m)
    angles = np.asarray(module.face_angles(fl, False))
    hangles = np.asarray(module.face_angles(fl, True))
    n = tri.n_vertices
    cases = {
        "face_angles": lambda: module.face_angles(fl, False),
        "face_angles (hyp)": lambda: module.face_angles(fl, True),
        "curvature": lambda: module.curvature(tri.face_vertices, angles, n),
        "edge_margins": lambda: module.edge_margins(tri.edge_sides, angles, False),
        "cotan_jacobian": lambda: module.cotan_jacobian(tri.face_vertices, angles, n),
        "hyperbolic_jacobian": lambda: module.hyperbolic_jacobian(tri.face_vertices, fl, hangles, n),
        "triangle_angles x1000": lambda: [module.triangle_angles(1.0, 1.1, 1.2, False) for _ in range(1000)],
    }
    return {name: best(fn, repeat, 20) for name, fn in cases.items()}


def bench_flow(module, tri, m):
    use_backend(module)
    start = timeit.default_timer()
    result = run_flow(tri, m, np.zeros(tri.n_vertices))
    return timeit.default_timer() - start, len(result.trace) - 1


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=40, help="grid torus is size x size")
    parser.add_argument("--flow-size", type=int, default=8)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = kernels.available_backends()
    tri, m = perturbed_torus(args.size)
    print(f"grid torus {args.size}x{args.size}: {tri.n_vertices} vertices, {tri.n_faces} faces")
    results = {name: bench_kernels(mod, tri, m, args.repeat) for name, mod in backends.items()}
    names = sorted(backends)
    print(f"{'kernel':<24}" + "".join(f"{n:>12}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for case in results[names[0]]:
        row = f"{case:<24}" + "".join(f"{results[n][case] * 1e6:>10.1f}us" for n in names)
        if len(names) == 2:
            row += f"{results['python'][case] / results['cython'][case]:>11.1f}x"
        print(row)

    tri, m = perturbed_torus(args.flow_size, seed=1)
    print(f"\nflow to K* = 0 on grid torus {args.flow_size}x{args.flow_size}")
    for name in names:
        seconds, steps = bench_flow(backends[name], tri, m)
        print(f"{name:<10} {seconds:8.3f} s  {steps} steps  {seconds / max(steps, 1) * 1e3:.2f} ms/step")
    if not math.isfinite(seconds):
        raise SystemExit(1)


if __name__ == "__main__":
    main()
