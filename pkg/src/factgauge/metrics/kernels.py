"""Longest-common-subsequence kernels.

Two interchangeable implementations of the same O(n*m) two-row DP:
a numba-jitted loop (default when numba imports) and a vectorized numpy
fallback. Set FACTGAUGE_NO_NUMBA=1 to force the numpy path; both return
identical values. scripts/bench_kernels.py compares their throughput.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "HAVE_NUMBA",
    "kernel_in_use",
    "lcs_length",
    "lcs_length_numpy",
    "lcs_length_numba",
]


def lcs_length_numpy(a: np.ndarray, b: np.ndarray) -> int:
    """Row-sweep LCS: cur[j] = max(prev[j], cur[j-1], prev[j-1]+1 on match).

    The cur[j-1] term unrolls to a running prefix maximum, so each row is
    three vector ops instead of an inner loop.
    """
    if a.size == 0 or b.size == 0:
        return 0
    prev = np.zeros(b.size + 1, dtype=np.int32)
    for x in a:
        cur = np.where(b == x, prev[:-1] + 1, 0)
        np.maximum(cur, prev[1:], out=cur)
        np.maximum.accumulate(cur, out=cur)
        prev[1:] = cur
    return int(prev[-1])


def _lcs_length_loop(a: np.ndarray, b: np.ndarray) -> int:
    n = b.shape[0]
    prev = np.zeros(n + 1, dtype=np.int32)
    cur = np.zeros(n + 1, dtype=np.int32)
    for i in range(a.shape[0]):
        ai = a[i]
        for j in range(n):
            best = prev[j + 1]
            if cur[j] > best:
                best = cur[j]
            if ai == b[j] and prev[j] + 1 > best:
                best = prev[j] + 1
            cur[j + 1] = best
        prev, cur = cur, prev
    return int(prev[n])


try:
    from numba import njit

    lcs_length_numba = njit(cache=True, nogil=True)(_lcs_length_loop)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on the environment
    lcs_length_numba = _lcs_length_loop
    HAVE_NUMBA = False

_FORCE_NUMPY = os.environ.get("FACTGAUGE_NO_NUMBA", "").lower() in ("1", "true", "yes")


def kernel_in_use() -> str:
    return "numba" if HAVE_NUMBA and not _FORCE_NUMPY else "numpy"


def lcs_length(a: np.ndarray, b: np.ndarray) -> int:
    """LCS length of two int32 code sequences via the active kernel."""
    if kernel_in_use() == "numba":
        return int(lcs_length_numba(np.ascontiguousarray(a), np.ascontiguousarray(b)))
    return lcs_length_numpy(a, b)
