"""Compare the numba and pure-numpy kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both paths are called directly, independent of GRAPHON_CENTRALITY_DISABLE_NUMBA.
Compilation happens before timing.
"""
import argparse
import timeit

import numpy as np

from graphon_centrality import _accel, _kernels


def _best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_jacobi(sizes, repeat):
    rng = np.random.default_rng(0)
    rows = []
    for n in sizes:
        a = rng.standard_normal((n, n))
        a = a + a.T
        t_np = _best(lambda: _kernels.jacobi_eig_numpy(a, 1e-14, 100), repeat)
        t_nb = _best(lambda: _kernels.jacobi_eig_numba(a, 1e-14, 100), repeat) if _accel.HAVE_NUMBA else float("nan")
        rows.append(("jacobi_eig", n, t_np, t_nb))
    return rows


def bench_bernoulli(sizes, repeat):
    rows = []
    seed = np.uint64(12345)
    for n in sizes:
        thresh = np.full((n, n), 0.3)
        t_np = _best(lambda: _kernels.bernoulli_symmetric_numpy(thresh, seed), repeat)
        t_nb = _best(lambda: _kernels.bernoulli_symmetric_numba(thresh, seed), repeat) if _accel.HAVE_NUMBA else float("nan")
        rows.append(("bernoulli_symmetric", n, t_np, t_nb))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _accel.HAVE_NUMBA:
        _kernels.jacobi_eig_numba(np.eye(3), 1e-14, 10)
        _kernels.bernoulli_symmetric_numba(np.full((3, 3), 0.5), np.uint64(1))
    rows = bench_jacobi([16, 32, 64], args.repeat) + bench_bernoulli([500, 1000, 2000], args.repeat)
    print(f"{'kernel':<22}{'n':>6}{'numpy [ms]':>14}{'numba [ms]':>14}{'speed-up':>10}")
    for name, n, t_np, t_nb in rows:
        print(f"{name:<22}{n:>6}{1e3 * t_np:>14.3f}{1e3 * t_nb:>14.3f}{t_np / t_nb:>10.1f}")


if __name__ == "__main__":
    main()
