"""Brute-force references for validating the fast algorithms at small sizes.

Nothing here calls into the matcher or the exact/heuristic modules; copies are
found by comparing every window directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .core import BudgetExceeded, NdArray, Pattern, UsageError


def naive_occurrences(A: NdArray, P: Pattern) -> set:
    """Set of start coordinates (tuples) of all copies of ``P`` in ``A``."""
    v = A.values if isinstance(A, NdArray) else np.asarray(A)
    p = P.values
    if v.ndim != p.ndim or any(n < m for n, m in zip(v.shape, p.shape)):
        return set()
    win = sliding_window_view(v, p.shape)
    hit = (win == p).reshape(win.shape[: v.ndim] + (-1,)).all(axis=-1)
    return {tuple(int(c) for c in x) for x in np.argwhere(hit)}


def _has_copy(v: np.ndarray, p: np.ndarray) -> bool:
    if any(n < m for n, m in zip(v.shape, p.shape)):
        return False
    win = sliding_window_view(v, p.shape)
    return bool((win == p).reshape(win.shape[: v.ndim] + (-1,)).all(axis=-1).any())


def _copy_covers(v: np.ndarray, p: np.ndarray, x: tuple) -> bool:
    """Whether some copy of ``p`` in ``v`` contains cell ``x``."""
    k = p.shape[0]
    lo = tuple(max(0, c - k + 1) for c in x)
    hi = tuple(min(n, c + k) for c, n in zip(x, v.shape))
    return _has_copy(v[tuple(slice(a, b) for a, b in zip(lo, hi))], p)


def brute_force_deletion_number(A: NdArray, P: Pattern, r_max: int = 4) -> int:
    """Fewest changed entries making ``A`` free of ``P``.

    Iterative deepening over every ``r``-subset of all cells and every
    reassignment of those cells; raises :class:`BudgetExceeded` past ``r_max``.
    """
    v = A.values.astype(np.int64)
    p = P.values.astype(np.int64)
    sigma = max(A.sigma, P.sigma)
    if not _has_copy(v, p):
        return 0
    cells = list(itertools.product(*(range(n) for n in v.shape)))
    for r in range(1, r_max + 1):
        for subset in itertools.combinations(cells, r):
            alts = [[s for s in range(sigma) if s != v[c]] for c in subset]
            for values in itertools.product(*alts):
                w = v.copy()
                for c, s in zip(subset, values):
                    w[c] = s
                if not _has_copy(w, p):
                    return r
    raise BudgetExceeded(f"deletion number exceeds {r_max}")


def bounded_search_deletion_number(A: NdArray, P: Pattern, r_max: int = 12) -> int:
    """Exact deletion number by branching on the cells of a surviving copy.

    Any valid set of changes must alter a not-yet-assigned cell of every copy
    present in the current array, so branching over those cells is complete.
    A packing of copies with disjoint unassigned cells gives the lower bound.
    """
    v0 = A.values.astype(np.int64)
    p = P.values.astype(np.int64)
    sigma = max(A.sigma, P.sigma)
    k, d = P.k, P.ndim
    offsets = list(itertools.product(range(k), repeat=d))

    def copies(w):
        if any(n < k for n in w.shape):
            return []
        win = sliding_window_view(w, p.shape)
        hit = (win == p).reshape(win.shape[:d] + (-1,)).all(axis=-1)
        return [tuple(int(c) for c in x) for x in np.argwhere(hit)]

    def free_cells(start, assigned):
        return [tuple(s + o for s, o in zip(start, off)) for off in offsets if tuple(s + o for s, o in zip(start, off)) not in assigned]

    def packing(found, assigned):
        used, count = set(), 0
        for q in found:
            cells = free_cells(q, assigned)
            if not cells:
                return None
            if used.isdisjoint(cells):
                used.update(cells)
                count += 1
        return count

    def search(w, assigned, budget):
        found = copies(w)
        if not found:
            return True
        if budget == 0:
            return False
        lb = packing(found, assigned)
        if lb is None or lb > budget:
            return False
        for c in free_cells(found[0], assigned):
            orig = w[c]
            for s in range(sigma):
                if s == v0[c]:
                    continue
                w[c] = s
                assigned.add(c)
                ok = search(w, assigned, budget - 1)
                assigned.discard(c)
                w[c] = orig
                if ok:
                    return True
        return False

    for r in range(r_max + 1):
        if search(v0.copy(), set(), r):
            return r
    raise BudgetExceeded(f"deletion number exceeds {r_max}")


def _all_codes_free(n: int, P: Pattern) -> np.ndarray:
    k = P.k
    codes = np.arange(1 << n, dtype=np.int64)
    free = np.ones(1 << n, dtype=bool)
    p_int = sum(int(b) << j for j, b in enumerate(P.values))
    mask = (1 << k) - 1
    for i in range(n - k + 1):
        free &= ((codes >> i) & mask) != p_int
    return free


def deletion_numbers_all_strings(n: int, P: Pattern) -> np.ndarray:
    """Deletion number of every binary string of length ``n`` at once.

    Entry ``c`` belongs to the string whose symbol ``i`` is bit ``i`` of ``c``.
    Computed as the Hamming distance to the nearest pattern-free string by
    relaxation over the hypercube.
    """
    if P.ndim != 1 or P.sigma != 2:
        raise UsageError("hypercube oracle is for binary 1D patterns")
    if n > 24:
        raise BudgetExceeded("hypercube oracle limited to n <= 24")
    codes = np.arange(1 << n, dtype=np.int64)
    dist = np.where(_all_codes_free(n, P), 0, n + 1).astype(np.int64)
    for _ in range(n):
        new = dist.copy()
        for b in range(n):
            np.minimum(new, dist[codes ^ (1 << b)] + 1, out=new)
        if np.array_equal(new, dist):
            break
        dist = new
    return dist


def string_from_code(code: int, n: int) -> NdArray:
    return NdArray([(code >> i) & 1 for i in range(n)], 2)


def brute_force_hitting_number(A: NdArray, P: Pattern) -> int:
    """Smallest set of cells meeting every copy, by increasing-size enumeration."""
    k, d = P.k, P.ndim
    occ = sorted(naive_occurrences(A, P))
    if not occ:
        return 0
    covers = [frozenset(tuple(s + o for s, o in zip(x, off)) for off in itertools.product(range(k), repeat=d)) for x in occ]
    universe = sorted(set().union(*covers))
    for r in range(1, len(occ) + 1):
        for subset in itertools.combinations(universe, r):
            chosen = set(subset)
            if all(not chosen.isdisjoint(c) for c in covers):
                return r
    return len(occ)


def brute_force_max_evidences(S: NdArray, k: int) -> int:
    """Largest set of pairwise non-overlapping evidences for ``1 0^(k-1)``.

    Evidences are pairs ``i < j`` with a one at ``i`` and zeros on
    ``j .. j+k-2``; two are non-overlapping when their ones differ and their
    runs start at least ``k - 1`` apart. Exhaustive, tiny ``n`` only.
    """
    s = S.values.astype(np.int64)
    n = s.size
    ev = [
        (i, j)
        for j in range(1, n - k + 2)
        if not s[j : j + k - 1].any()
        for i in range(j)
        if s[i] == 1
    ]

    def compatible(a, b):
        return a[0] != b[0] and abs(a[1] - b[1]) >= k - 1

    best = 0

    def grow(chosen, rest):
        nonlocal best
        best = max(best, len(chosen))
        if len(chosen) + len(rest) <= best:
            return
        for idx, e in enumerate(rest):
            if all(compatible(e, c) for c in chosen):
                grow(chosen + [e], rest[idx + 1 :])

    grow([], ev)
    return best


def has_safe_change(A: NdArray, P: Pattern, start) -> bool:
    """Whether one change inside the copy at ``start`` creates no other copy."""
    v = A.values.astype(np.int64)
    p = P.values.astype(np.int64)
    sigma = max(A.sigma, P.sigma)
    k = P.k
    for off in itertools.product(range(k), repeat=P.ndim):
        x = tuple(s + o for s, o in zip(start, off))
        orig = v[x]
        for s in range(sigma):
            if s == orig:
                continue
            v[x] = s
            bad = _copy_covers(v, p, x)
            v[x] = orig
            if not bad:
                return True
    return False


def template_is_rigid(A: NdArray, P: Pattern, start) -> bool:
    """True when every single change inside the copy at ``start`` creates a new copy."""
    if tuple(start) not in naive_occurrences(A, P):
        raise UsageError(f"no copy at {tuple(start)}")
    return not has_safe_change(A, P, start)


def new_copies_after(A: NdArray, P: Pattern, x, value) -> set:
    """Copies present after writing ``value`` at ``x`` that were absent before."""
    before = naive_occurrences(A, P)
    w = A.values.copy()
    w[tuple(x)] = value
    return naive_occurrences(A.with_values(w), P) - before


@dataclass(frozen=True)
class RemovabilityResult:
    passed: bool
    checked: int
    counterexample: Optional[NdArray] = None
    template_start: Optional[tuple] = None


def exhaustive_removability_1d(P: Pattern, pad: Optional[int] = None, max_k: int = 5) -> RemovabilityResult:
    """Try every binary host with the template padded by ``pad`` cells per side."""
    if P.ndim != 1 or P.sigma != 2:
        raise UsageError("exhaustive 1D check is for binary patterns")
    k = P.k
    if k > max_k:
        raise BudgetExceeded(f"k={k} exceeds the exhaustive budget max_k={max_k}")
    pad = k - 1 if pad is None else pad
    checked = 0
    for fill in itertools.product((0, 1), repeat=2 * pad):
        host = NdArray(np.concatenate([fill[:pad], P.values, fill[pad:]]).astype(np.uint8), 2)
        checked += 1
        if not has_safe_change(host, P, (pad,)):
            return RemovabilityResult(False, checked, host, (pad,))
    return RemovabilityResult(True, checked)


def known_rigid_hosts(P: Pattern) -> list:
    """Hosts with a rigid template known from the constructions, if any."""
    from .classify import classify, is_almost_homogeneous, nonremovable_witness

    if P.sigma == 2 and is_almost_homogeneous(P) is not None:
        return [nonremovable_witness(P)]
    cls = classify(P)
    return [cls.witness] if cls.witness is not None else []


def randomized_removability_nd(P: Pattern, trials: int = 1000, seed: int = 0, inject_known: bool = True) -> RemovabilityResult:
    """Probe removability on random hosts of side ``3k - 2`` with a planted template.

    Passing is evidence, not proof. Known rigid hosts are checked first when
    ``inject_known`` is set.
    """
    k, d = P.k, P.ndim
    sigma = P.sigma
    checked = 0
    if inject_known:
        for host, start in known_rigid_hosts(P):
            checked += 1
            if not has_safe_change(host, P, start):
                return RemovabilityResult(False, checked, host, tuple(start))
    rng = np.random.default_rng(seed)
    side = 3 * k - 2
    start = (k - 1,) * d
    box = tuple(slice(k - 1, 2 * k - 1) for _ in range(d))
    for _ in range(trials):
        v = rng.integers(0, sigma, size=(side,) * d).astype(np.uint8)
        v[box] = P.values
        host = NdArray(v, sigma)
        checked += 1
        if not has_safe_change(host, P, start):
            return RemovabilityResult(False, checked, host, start)
    return RemovabilityResult(True, checked)
