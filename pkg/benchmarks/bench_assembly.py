#!/usr/bin/env python3
"""Benchmark the element kernels: compiled extension vs numpy fallback.

Usage:
    python benchmarks/bench_assembly.py [--levels 2,3,4] [--repeats 5]

Times the batched local-matrix computation for every element family on
disk meshes of increasing refinement and reports the speedup of the
compiled backend. Falls back gracefully (and says so) when only the
numpy backend is available.
"""
import argparse
import time

import numpy as np

from bucklab import make_disk_mesh
from bucklab._kernels import BACKEND, available_backends


def _time(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--levels", default="2,3,4")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    levels = [int(x) for x in args.levels.split(",")]

    backends = available_backends()
    print(f"active backend: {BACKEND}; available: {', '.join(backends)}")
    header = f"{'kernel':<16} {'level':>5} {'elems':>7} " + " ".join(
        f"{name + ' [ms]':>13}" for name in backends
    )
    if len(backends) > 1:
        header += f" {'speedup':>9}"
    print(header)

    for level in levels:
        mesh = make_disk_mesh(1.0, level)
        coords = np.ascontiguousarray(mesh.vertices[mesh.triangles])
        normals = np.ascontiguousarray(mesh.edge_normals[mesh.tri_edges])
        cases = [
            ("lagrange1_local", (coords,)),
            ("lagrange2_local", (coords,)),
            ("morley_local", (coords, normals)),
        ]
        for kernel, kargs in cases:
            times = {
                name: _time(getattr(mod, kernel), kargs, args.repeats)
                for name, mod in backends.items()
            }
            row = f"{kernel:<16} {level:>5} {len(coords):>7} " + " ".join(
                f"{1e3 * times[name]:>13.3f}" for name in backends
            )
            if len(backends) > 1:
                row += f" {times['python'] / times['cython']:>8.1f}x"
            print(row)


if __name__ == "__main__":
    main()
