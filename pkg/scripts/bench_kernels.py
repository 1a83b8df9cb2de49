#!/usr/bin/env python3
"""Benchmark the compiled LCS kernel against the numpy fallback.

Times both implementations on random token-id sequences at several
lengths and prints a small table. Run after any kernel change; the
compiled path should win clearly on realistic document lengths.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from factgauge.metrics.kernels import (
    HAVE_NUMBA,
    kernel_in_use,
    lcs_length_numba,
    lcs_length_numpy,
)


def bench(fn, a: np.ndarray, b: np.ndarray, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(a, b)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--vocab", type=int, default=500)
    parser.add_argument(
        "--lengths", type=int, nargs="+", default=[50, 200, 800, 3000]
    )
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print(f"numba available: {HAVE_NUMBA}; dispatch selects: {kernel_in_use()}")
    if not HAVE_NUMBA:
        print("numba missing; benchmarking the numpy path only")

    header = f"{'n x n':>10} {'numpy (ms)':>12}"
    if HAVE_NUMBA:
        header += f" {'numba (ms)':>12} {'speedup':>9}"
    print(header)
    for n in args.lengths:
        a = rng.integers(0, args.vocab, size=n).astype(np.int32)
        b = rng.integers(0, args.vocab, size=n).astype(np.int32)
        if HAVE_NUMBA:
            # warm the JIT outside the timed region
            lcs_length_numba(a, b)
        t_np = bench(lcs_length_numpy, a, b, args.repeats)
        line = f"{n:>10} {t_np * 1e3:>12.3f}"
        if HAVE_NUMBA:
            t_nb = bench(lcs_length_numba, a, b, args.repeats)
            line += f" {t_nb * 1e3:>12.3f} {t_np / t_nb:>8.1f}x"
        print(line)


if __name__ == "__main__":
    main()
