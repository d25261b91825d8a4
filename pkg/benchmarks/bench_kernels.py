"""Compare the compiled kernels against the numpy fallback.

Times pairwise_distances, cross_distances, and jacobi_eigh on a range of
problem sizes and reports best-of-N wall times, the speedup, and the
largest absolute deviation between the two backends' outputs.

Usage:
    python benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from rnkmeans.kernels import _py

try:
    from rnkmeans.kernels import _cy
except ImportError:
    _cy = None


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def deviation(a, b):
    if isinstance(a, tuple):
        return max(deviation(x, y) for x, y in zip(a, b))
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def jacobi_deviation(py_out, cy_out):
    # eigenvector signs are fixed by convention, so values and vectors are
    # both directly comparable
    return max(deviation(py_out[0], cy_out[0]), deviation(py_out[1], cy_out[1]))


def cases():
    rs = np.random.RandomState(0)
    for n, d in ((100, 3), (400, 8), (1000, 16)):
        x = np.ascontiguousarray(rs.randn(n, d))
        c = np.ascontiguousarray(rs.randn(8, d))
        yield (f"pairwise  n={n:<5d} d={d:<2d}",
               lambda x=x: _py.pairwise_distances(x),
               lambda x=x: _cy.pairwise_distances(x),
               deviation)
        yield (f"cross     n={n:<5d} d={d:<2d} k=8",
               lambda x=x, c=c: _py.cross_distances(x, c),
               lambda x=x, c=c: _cy.cross_distances(x, c),
               deviation)
    for n in (20, 60, 120):
        m = rs.randn(n, n)
        a = np.ascontiguousarray((m + m.T) / 2.0)
        yield (f"jacobi    n={n:<5d}",
               lambda a=a: _py.jacobi_eigh(a, 1e-10, 100),
               lambda a=a: _cy.jacobi_eigh(a, 1e-10, 100),
               jacobi_deviation)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5,
                        help="take the best of this many runs")
    args = parser.parse_args()

    if _cy is None:
        print("compiled kernels are not installed; nothing to compare "
              "(build the extension, or reinstall without RNKMEANS_KERNELS=py)")
        return 1

    print(f"{'case':<28s} {'pure':>10s} {'compiled':>10s} "
          f"{'speedup':>8s} {'max dev':>10s}")
    for name, py_fn, cy_fn, dev_fn in cases():
        t_py, out_py = best_of(py_fn, args.repeats)
        t_cy, out_cy = best_of(cy_fn, args.repeats)
        dev = dev_fn(out_py, out_cy)
        print(f"{name:<28s} {t_py * 1e3:>8.2f}ms {t_cy * 1e3:>8.2f}ms "
              f"{t_py / t_cy:>7.1f}x {dev:>10.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
