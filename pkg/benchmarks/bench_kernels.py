"""Timing comparison of the jitted kernels against their numpy fallbacks.

Run as: python3 benchmarks/bench_kernels.py [--sizes 1000,10000,100000]
The jitted path must be available (SIEVEPATH_NUMBA unset or != 0).
"""

import argparse
import time

import numpy as np

from sievepath import _kernels


def timeit(fn, *args, repeat=5):
    fn(*args)  # warm-up / jit compile
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="1000,10000,100000")
    parser.add_argument("--dim", type=int, default=10)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if not _kernels.NUMBA_ENABLED:
        raise SystemExit("jitted kernels disabled (SIEVEPATH_NUMBA=0); nothing to compare")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<22}{'m':>9}{'numpy':>12}{'numba':>12}{'speedup':>9}")
    for m in sizes:
        V = rng.standard_normal((args.dim, m))
        tau = rng.random(m) + 0.1
        pairs = [
            ("column_norms", _kernels._column_norms_np, _kernels._column_norms_nb, (V,)),
            ("prox_columns", _kernels._prox_columns_np, _kernels._prox_columns_nb, (V, tau)),
            ("project_columns", _kernels._project_columns_np, _kernels._project_columns_nb, (V, tau)),
        ]
        n = max(m // 3, 2)
        ei = rng.integers(0, n - 1, size=m)
        ej = ei + rng.integers(1, np.maximum(n - ei - 1, 2).astype(np.int64))
        ej = np.minimum(ej, n - 1).astype(np.int64)
        pairs.append((
            "union_find_labels",
            _kernels._union_find_min_labels_np,
            _kernels._union_find_min_labels_nb,
            (n, ei.astype(np.int64), ej),
        ))
        for name, f_np, f_nb, a in pairs:
            t_np = timeit(f_np, *a)
            t_nb = timeit(f_nb, *a)
            print(f"{name:<22}{m:>9}{t_np * 1e3:>10.3f}ms{t_nb * 1e3:>10.3f}ms{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
