"""Compiled vs pure-Python lattice scan.

Times the classification kernel alone (the bounding-box scan) and the full
``enumerate_lattice_points`` call, which also builds the point tuples.

    python3 benchmarks/bench_lattice.py [--repeat 3] [--jobs 1]
"""
import argparse
import math
import time

import numpy as np

from bsq import _kernels
from bsq.toric import DelzantPolytope, bounding_box, enumerate_lattice_points

CASES = [
    ("interval [0,10^6]", DelzantPolytope(1, (((1,), 10**6), ((-1,), 0)))),
    ("square [0,1500]^2", DelzantPolytope.box([0, 0], [1500, 1500])),
    ("triangle x+y<=2000", DelzantPolytope.simplex(2, 2000)),
    ("simplex x+y+z<=150", DelzantPolytope.simplex(3, 150)),
    ("cube [0,120]^3", DelzantPolytope.box([0, 0, 0], [120, 120, 120])),
]


def best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def kernel_args(poly):
    lo, hi = bounding_box(poly)
    shape = [b - a + 1 for a, b in zip(lo, hi)]
    lcm = math.lcm(*(c.denominator for _, c in poly.halfspaces))
    normals = np.array([u for u, _ in poly.halfspaces], dtype=np.int64)
    num = np.array([int(c * lcm) for _, c in poly.halfspaces], dtype=np.int64)
    den = np.full(len(poly.halfspaces), lcm, dtype=np.int64)
    return normals, num, den, np.array(lo, dtype=np.int64), np.array(shape, dtype=np.int64), 0, math.prod(shape)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    kernels = {"python": _kernels.python_classify_range}
    if _kernels.BACKEND == "compiled":
        kernels["compiled"] = _kernels.classify_range
    names = list(kernels)
    head = " ".join(f"{'scan ' + b:>14}" for b in names) + " " + " ".join(f"{'full ' + b:>14}" for b in names)
    print(f"{'case':<22} {'candidates':>10} {head}  scan speedup")
    for name, poly in CASES:
        a = kernel_args(poly)
        scan = {b: best(lambda: fn(*a), args.repeat) for b, fn in kernels.items()}
        codes = [c for _, c in scan.values()]
        assert all(np.array_equal(codes[0], c) for c in codes), f"kernels disagree on {name}"
        full = {b: best(lambda: enumerate_lattice_points(poly, args.jobs, backend=b), args.repeat) for b in names}
        assert len({r for _, r in full.values()}) == 1, f"backends disagree on {name}"
        cells = " ".join(f"{scan[b][0] * 1e3:12.1f}ms" for b in names)
        cells += " " + " ".join(f"{full[b][0] * 1e3:12.1f}ms" for b in names)
        speed = f"{scan['python'][0] / scan['compiled'][0]:8.1f}x" if "compiled" in scan else "       -"
        print(f"{name:<22} {a[-1]:>10} {cells}  {speed}")
    if "compiled" not in kernels:
        print("compiled kernel not built; only the fallback was timed")


if __name__ == "__main__":
    main()
