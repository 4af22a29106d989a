"""Enumerate copies of a pattern in strings, arrays and cyclic windows."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .core import NdArray, Pattern, UsageError, extract_cyclic_window


@dataclass(frozen=True)
class OccurrenceSet:
    """Row-major sorted start coordinates of pattern copies.

    ``starts`` has shape ``(m, d)``.
    """

    starts: np.ndarray
    k: int
    dims: tuple

    def __len__(self):
        return self.starts.shape[0]

    def __iter__(self):
        return (tuple(int(c) for c in row) for row in self.starts)

    def __contains__(self, x):
        x = np.asarray(x if not np.isscalar(x) else (x,))
        return bool((self.starts == x).all(axis=1).any())

    @property
    def positions(self) -> np.ndarray:
        """Flat start positions (1D only)."""
        if self.starts.shape[1] != 1:
            raise UsageError("positions is only defined for 1D occurrences")
        return self.starts[:, 0]

    def as_set(self) -> set:
        return set(iter(self))


def _occ_1d(starts: np.ndarray, k: int, n: int) -> OccurrenceSet:
    return OccurrenceSet(starts.reshape(-1, 1), k, (n,))


def find_occurrences_1d(S: NdArray, P: Pattern) -> OccurrenceSet:
    """All overlapping matches of ``P`` in ``S`` in O(n + k) time."""
    if S.ndim != 1 or P.ndim != 1:
        raise UsageError("find_occurrences_1d needs 1D inputs")
    p = K.as_kernel_array(P.values)
    fail = K.kmp_failure(p)
    starts = K.kmp_search(K.as_kernel_array(S.values), p, fail)
    return _occ_1d(starts, P.k, S.size)


def _match_mask(values: np.ndarray, P: Pattern) -> np.ndarray:
    """Boolean array over all start positions, True where ``P`` matches."""
    k, d = P.k, P.ndim
    if values.ndim != d:
        raise UsageError(f"pattern dimension {d} does not match array dimension {values.ndim}")
    out_shape = tuple(n - k + 1 for n in values.shape)
    if any(s <= 0 for s in out_shape):
        return np.zeros((0,) * d, dtype=bool)
    mask = np.ones(out_shape, dtype=bool)
    pv = P.values
    for y in itertools.product(range(k), repeat=d):
        sl = tuple(slice(yi, yi + s) for yi, s in zip(y, out_shape))
        mask &= values[sl] == pv[y]
        if not mask.any():
            break
    return mask


def find_occurrences_nd(A: NdArray, P: Pattern) -> OccurrenceSet:
    """All starts ``x`` with ``A[x + y] == P[y]`` for every ``y``."""
    mask = _match_mask(A.values, P)
    starts = np.argwhere(mask).astype(np.int64).reshape(-1, P.ndim)
    return OccurrenceSet(starts, P.k, A.dims)


def find_occurrences(A: NdArray, P: Pattern) -> OccurrenceSet:
    if A.ndim == 1:
        return find_occurrences_1d(A, P)
    return find_occurrences_nd(A, P)


def straddles_seam(starts: np.ndarray, seams, k: int) -> np.ndarray:
    """True for window-local starts whose k-span crosses a wrap seam on any axis."""
    bad = np.zeros(starts.shape[0], dtype=bool)
    for axis, w in enumerate(seams):
        if w is None:
            continue
        s = starts[:, axis]
        bad |= (s < w) & (w < s + k)
    return bad


def occurrences_in_window(A: NdArray, start, sides, P: Pattern) -> OccurrenceSet:
    """Copies inside a cyclic window, in window-local coordinates.

    Alignments that straddle the wrap seam on any axis are not copies in the
    host array and are excluded.
    """
    if isinstance(sides, (int, np.integer)):
        sides = (int(sides),) * A.ndim
    if any(L < P.k for L in sides):
        raise UsageError(f"window sides {tuple(sides)} smaller than pattern side {P.k}")
    w = extract_cyclic_window(A, start, sides)
    occ = find_occurrences(w.array, P)
    keep = ~straddles_seam(occ.starts, w.seams, P.k)
    return OccurrenceSet(occ.starts[keep], P.k, w.array.dims)


def occurrences_containing(A: NdArray, P: Pattern, x) -> OccurrenceSet:
    """Copies of ``P`` in ``A`` that include cell ``x`` (local rescan)."""
    k = P.k
    lo = [max(0, c - k + 1) for c in x]
    hi = [min(n, c + k) for c, n in zip(x, A.dims)]
    sub = A.values[tuple(slice(a, b) for a, b in zip(lo, hi))]
    if sub.ndim == 1 and P.ndim == 1:
        p = K.as_kernel_array(P.values)
        starts = K.kmp_search(K.as_kernel_array(sub), p, K.kmp_failure(p)).reshape(-1, 1)
    else:
        starts = np.argwhere(_match_mask(sub, P)).astype(np.int64).reshape(-1, P.ndim)
    return OccurrenceSet(starts + np.asarray(lo, dtype=np.int64), k, A.dims)
