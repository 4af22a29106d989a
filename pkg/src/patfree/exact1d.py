"""Exact distance to pattern freeness for strings.

For a removable binary pattern the deletion number equals the hitting number,
which a greedy left-to-right stab computes in O(n + k). Almost homogeneous
patterns are handled by a constant-space evidence count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .classify import Kind, canonicalize_almost_homo, classify
from .core import DistanceValue, FlipSet, NdArray, NoSafeFlip, Pattern, UsageError
from .matcher import find_occurrences_1d


def _check_1d(S: NdArray, P: Pattern):
    if S.ndim != 1 or P.ndim != 1:
        raise UsageError("expected 1D string and pattern")


def effective_pattern(S: NdArray, P: Pattern) -> Pattern:
    """``P`` relabeled over the larger of the two alphabets."""
    sigma = max(S.sigma, P.sigma)
    return P if P.sigma == sigma else Pattern(P.values, sigma)


def hitting_number_1d(S: NdArray, P: Pattern):
    """Greedy minimal hitting set: ``(DistanceValue, sorted positions)``."""
    _check_1d(S, P)
    occ = find_occurrences_1d(S, P)
    hits = K.greedy_stab(np.ascontiguousarray(occ.positions), P.k)
    return DistanceValue(int(hits.size), S.size), hits


def _creates_copy_at(s: np.ndarray, pos: int, value: int, p: np.ndarray, fail) -> bool:
    """Whether writing ``value`` at ``pos`` leaves some copy covering ``pos``."""
    k = p.size
    lo, hi = max(0, pos - k + 1), min(s.size, pos + k)
    sub = s[lo:hi].copy()
    sub[pos - lo] = value
    return K.kmp_search(sub, p, fail).size > 0


def _verified_flip(s: np.ndarray, start: int, p: np.ndarray, sigma: int):
    fail = K.kmp_failure(p)
    k = p.size
    order = sorted(range(k), key=lambda o: abs(o - k // 2))
    for off in order:
        pos = start + off
        for v in range(sigma):
            if v != s[pos] and not _creates_copy_at(s, pos, v, p, fail):
                return pos, v
    raise NoSafeFlip(f"no safe single change inside the copy at {start}")


def _longest_zero_run(q):
    best_len, best_start, run = 0, -1, 0
    for i, b in enumerate(q):
        run = run + 1 if b == 0 else 0
        if run > best_len:
            best_len, best_start = run, i - run + 1
    return best_len, best_start


def _binary_flip_offset(q: tuple, left) -> int:
    """Offset to flip in a removable binary pattern normalized to start with 1.

    ``left`` is the (normalized) symbol just before the copy, None at the
    string start.
    """
    k = len(q)
    t, i = _longest_zero_run(q)
    if i + t < k:
        return i + t
    # mirror case: longest run of ones, read from the right
    r = tuple(1 - b for b in reversed(q))
    t2, i2 = _longest_zero_run(r)
    if i2 + t2 < k:
        return k - 1 - (i2 + t2)
    s = next(j for j, b in enumerate(q) if b == 0)
    if any(b == 1 for b in q[s:]):
        return s
    # q = 1^s 0^t
    if left is None or left == 0:
        return 1
    return 0


def _safe_flip(s: np.ndarray, copy_start: int, p: np.ndarray, sigma: int, binary_removable: bool):
    k = p.size
    missing = sorted(set(range(sigma)) - set(np.unique(p).tolist()))
    if missing:
        return copy_start + k // 2, missing[0]
    if binary_removable:
        swap = int(p[0] == 0)
        q = tuple(int(b) ^ swap for b in p)
        left = None if copy_start == 0 else int(s[copy_start - 1]) ^ swap
        pos = copy_start + _binary_flip_offset(q, left)
        return pos, 1 - int(s[pos])
    return _verified_flip(s, copy_start, p, sigma)


def safe_flip_1d(S: NdArray, copy_start: int, P: Pattern):
    """A change inside the copy at ``copy_start`` that creates no other copy.

    Returns ``(position, new_value)``. Removable binary patterns use the
    constructive case analysis; anything else falls back to a verified search
    over all offsets and values, raising :class:`NoSafeFlip` if none exists.
    """
    _check_1d(S, P)
    P = effective_pattern(S, P)
    s = K.as_kernel_array(S.values)
    p = K.as_kernel_array(P.values)
    k = P.k
    if copy_start < 0 or copy_start + k > s.size or not np.array_equal(s[copy_start : copy_start + k], p):
        raise UsageError(f"no copy of the pattern starts at {copy_start}")
    binary_removable = P.sigma == 2 and classify(P).kind is Kind.REMOVABLE
    return _safe_flip(s, copy_start, p, P.sigma, binary_removable)


def _isolated_mask(starts: np.ndarray, k: int) -> np.ndarray:
    if starts.size == 0:
        return np.zeros(0, dtype=bool)
    gaps = np.diff(starts)
    left_ok = np.concatenate(([True], gaps >= k))
    right_ok = np.concatenate((gaps >= k, [True]))
    return left_ok & right_ok


def _intersecting_hits(starts: np.ndarray, k: int) -> list:
    """Minimal hitting set of pairwise-intersecting copies, every hit in two copies."""
    hits = []
    last = -1
    m = starts.size
    for idx in range(m):
        q = int(starts[idx])
        if q <= last:
            continue
        h = q + k - 1
        later = idx + 1 < m and starts[idx + 1] <= h
        if not later:
            # only an earlier copy overlaps; its overlap with this one starts at q
            h = q
        hits.append(h)
        last = q + k - 1
    return hits


def deletion_set_1d(S: NdArray, P: Pattern) -> FlipSet:
    """Changes making ``S`` free of ``P``; of minimum size for binary inputs.

    Isolated copies get a constructive safe flip; intersecting copies are hit
    by a minimal hitting set whose members each lie in two copies. Larger
    alphabets use verified value choices and, if needed, extra repair flips, so
    the result is only an upper bound there.
    """
    _check_1d(S, P)
    P = effective_pattern(S, P)
    k, sigma = P.k, P.sigma
    if sigma == 2 and classify(P).kind is Kind.NOT_REMOVABLE:
        return deletion_set_almost_homo_1d(S, P)
    starts = find_occurrences_1d(S, P).positions
    if starts.size == 0:
        return FlipSet()
    work = K.as_kernel_array(S.values).copy()
    p = K.as_kernel_array(P.values)
    fail = K.kmp_failure(p)
    iso = _isolated_mask(starts, k)
    flips = {}

    def put(pos, v):
        orig = int(S.values[pos])
        if v == orig:
            flips.pop(pos, None)
        else:
            flips[pos] = v
        work[pos] = v

    binary_removable = sigma == 2 and classify(P).kind is Kind.REMOVABLE
    for q in starts[iso]:
        pos, v = _safe_flip(work, int(q), p, sigma, binary_removable)
        put(pos, v)

    missing = sorted(set(range(sigma)) - set(np.unique(p).tolist()))
    for h in _intersecting_hits(starts[~iso], k):
        if sigma == 2:
            put(h, 1 - int(work[h]))
        elif missing:
            put(h, missing[0])
        else:
            for v in range(sigma):
                if v != work[h] and not _creates_copy_at(work, h, v, p, fail):
                    put(h, v)
                    break
            else:
                put(h, (int(work[h]) + 1) % sigma)

    left = K.kmp_search(work, p, fail)
    if left.size and sigma == 2:
        raise RuntimeError(f"deletion set left {left.size} copies; pattern not removable?")
    guard = 0
    while left.size:
        guard += 1
        if guard > S.size:
            raise NoSafeFlip("repair loop did not converge")
        pos, v = _verified_flip(work, int(left[0]), p, sigma)
        put(pos, v)
        left = K.kmp_search(work, p, fail)
    return FlipSet(tuple(((pos,), v) for pos, v in sorted(flips.items())))


def distance_almost_homo_1d(S: NdArray, P: Pattern) -> DistanceValue:
    """Deletion number for an almost homogeneous binary pattern, one pass."""
    _check_1d(S, P)
    if S.sigma != 2 or P.sigma != 2:
        raise UsageError("almost homogeneous distance requires binary inputs")
    cf = canonicalize_almost_homo(P)
    s = K.as_kernel_array(cf.apply(S).values)
    return DistanceValue(int(K.evidence_stream(s, P.k)), S.size)


@dataclass(frozen=True)
class Evidence:
    i: int
    j: int


def evidence_marking(S: NdArray, P: Pattern) -> list:
    """Greedy marking of non-overlapping evidences for ``1 0^(k-1)``.

    Each round takes the smallest ``j`` whose ``k - 1`` cells are unmarked
    zeros and that has an unmarked one to its left, pairs it with the nearest
    such one, and marks all ``k`` cells. Quadratic; meant for cross-checks.
    """
    _check_1d(S, P)
    cf = canonicalize_almost_homo(P)
    s = cf.apply(S).values.astype(np.int64)
    n, k = s.size, P.k
    marked = np.zeros(n, dtype=bool)
    T = []
    while True:
        found = False
        for j in range(1, n - k + 2):
            run = slice(j, j + k - 1)
            if marked[run].any() or s[run].any():
                continue
            ones = np.flatnonzero((s[:j] == 1) & ~marked[:j])
            if ones.size == 0:
                continue
            i = int(ones[-1])
            T.append(Evidence(i, j))
            marked[i] = True
            marked[run] = True
            found = True
            break
        if not found:
            return T


def _stack_evidences(s: np.ndarray, k: int) -> list:
    """Same marking as :func:`evidence_marking` in one pass with a stack of ones."""
    ones, T = [], []
    run = 0
    for idx, b in enumerate(s.tolist()):
        if b == 1:
            ones.append(idx)
            run = 0
        elif ones:
            run += 1
            if run == k - 1:
                T.append(Evidence(ones.pop(), idx - k + 2))
                run = 0
    return T, (ones[0] if ones else s.size)


def deletion_set_almost_homo_1d(S: NdArray, P: Pattern) -> FlipSet:
    """Minimum deletion set for an almost homogeneous binary pattern.

    One change per marked evidence: the one of the evidence is cleared when its
    run lies left of the first unmarked one, otherwise the last zero of its run
    is set.
    """
    _check_1d(S, P)
    if S.sigma != 2 or P.sigma != 2:
        raise UsageError("almost homogeneous deletion sets require binary inputs")
    cf = canonicalize_almost_homo(P)
    s = cf.apply(S).values.astype(np.int64)
    k = P.k
    T, m = _stack_evidences(s, k)
    work = s.copy()
    positions = []
    for e in T:
        pos = e.i if e.j < m else e.j + k - 2
        work[pos] ^= 1
        positions.append(pos)
    p = K.as_kernel_array(cf.pattern.values)
    if K.kmp_search(work, p, K.kmp_failure(p)).size:
        raise RuntimeError("evidence repair left a copy behind")
    n = S.size
    coords = sorted(cf.map_coord((pos,), (n,)) for pos in positions)
    return FlipSet.from_positions(S, coords)


def max_nonoverlapping_evidences(S: NdArray, P: Pattern) -> int:
    return len(evidence_marking(S, P))


def distance_exact_1d(S: NdArray, P: Pattern) -> DistanceValue:
    """Deletion number of ``S`` with respect to ``P``.

    Exact for binary inputs and for patterns missing a symbol of the
    alphabet. Otherwise the value is bracketed by the hitting number and the
    size of a constructed deletion set.
    """
    _check_1d(S, P)
    P = effective_pattern(S, P)
    cls = classify(P)
    if cls.kind is Kind.NOT_REMOVABLE:
        return distance_almost_homo_1d(S, P)
    h, _ = hitting_number_1d(S, P)
    if P.sigma == 2 or len(np.unique(P.values)) < P.sigma:
        return h
    upper = len(deletion_set_1d(S, P))
    return DistanceValue(h.absolute, S.size, upper)
