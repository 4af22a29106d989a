"""Compiled inner loops for the linear-time 1D routines."""

import numpy as np
from numba import njit


@njit(cache=True)
def kmp_failure(p):
    k = p.shape[0]
    fail = np.zeros(k, dtype=np.int64)
    j = 0
    for i in range(1, k):
        while j > 0 and p[i] != p[j]:
            j = fail[j - 1]
        if p[i] == p[j]:
            j += 1
        fail[i] = j
    return fail


@njit(cache=True)
def kmp_search(s, p, fail):
    """Start positions of all (overlapping) occurrences of ``p`` in ``s``."""
    n = s.shape[0]
    k = p.shape[0]
    out = np.empty(max(n - k + 1, 0), dtype=np.int64)
    m = 0
    if k > n:
        return out[:0]
    j = 0
    for i in range(n):
        c = s[i]
        while j > 0 and c != p[j]:
            j = fail[j - 1]
        if c == p[j]:
            j += 1
        if j == k:
            out[m] = i - k + 1
            m += 1
            j = fail[j - 1]
    return out[:m]


@njit(cache=True)
def greedy_stab(starts, k):
    """Rightmost cell of the leftmost unhit copy, repeated left to right."""
    out = np.empty(starts.shape[0], dtype=np.int64)
    m = 0
    last = -1
    for q in starts:
        if q > last:
            last = q + k - 1
            out[m] = last
            m += 1
    return out[:m]


@njit(cache=True)
def window_hitting_counts(rows, seams, p, fail):
    """Minimal hitting number of ``p`` inside each row of ``rows``.

    Occurrences whose span crosses the row's seam offset (``seams[r] > 0``)
    are not genuine copies of the host and are skipped.
    """
    t, L = rows.shape
    k = p.shape[0]
    counts = np.zeros(t, dtype=np.int64)
    if k > L:
        return counts
    for r in range(t):
        w = seams[r]
        j = 0
        last = -1
        c = 0
        for i in range(L):
            x = rows[r, i]
            while j > 0 and x != p[j]:
                j = fail[j - 1]
            if x == p[j]:
                j += 1
            if j == k:
                q = i - k + 1
                j = fail[j - 1]
                if w > 0 and q < w and w < q + k:
                    continue
                if q > last:
                    last = q + k - 1
                    c += 1
        counts[r] = c
    return counts


@njit(cache=True)
def evidence_stream(s, k):
    """Single pass counting non-overlapping evidences for ``1 0^(k-1)``.

    ``a`` counts unmarked ones seen, ``b`` the unmarked zero streak ending at
    the current position (a one breaks it).
    """
    a = 0
    b = 0
    c = 0
    for i in range(s.shape[0]):
        if s[i] == 1:
            a += 1
            b = 0
        elif a > 0:
            b += 1
            if b == k - 1:
                a -= 1
                b = 0
                c += 1
    return c


def as_kernel_array(values) -> np.ndarray:
    return np.ascontiguousarray(values, dtype=np.int64)
