"""Hitting sets and deletion procedures for d-dimensional arrays.

For removable patterns the deletion number is within a factor
``4**d + 2**d`` of the hitting number. Exact hitting numbers are computed by
branch and bound; this is only meant for the small blocks the samplers use
(or for sparse arrays, which split into small independent components).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .core import FlipSet, NdArray, NoSafeFlip, Pattern, UsageError
from .matcher import find_occurrences, occurrences_containing


@dataclass(frozen=True)
class NdConfig:
    d: int

    @property
    def alpha_d(self) -> int:
        return 4**self.d + 2**self.d


def alpha(d: int) -> int:
    return NdConfig(d).alpha_d


def overlap_components(starts: np.ndarray, k: int) -> list:
    """Group copies into connected components of the "shares a cell" relation."""
    m = starts.shape[0]
    if m == 0:
        return []
    d = starts.shape[1]
    index = {tuple(int(c) for c in row): i for i, row in enumerate(starts)}
    parent = list(range(m))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    shifts = [s for s in itertools.product(range(-k + 1, k), repeat=d) if s > (0,) * d]
    for i, row in enumerate(starts):
        base = tuple(int(c) for c in row)
        for s in shifts:
            j = index.get(tuple(b + o for b, o in zip(base, s)))
            if j is not None:
                ra, rb = find(i), find(j)
                if ra != rb:
                    parent[ra] = rb
    groups = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    return [starts[idx] for idx in groups.values()]


def _component_hitting(starts: np.ndarray, k: int):
    """Exact minimum hitting set of one component of overlapping copies."""
    m, d = starts.shape
    offsets = list(itertools.product(range(k), repeat=d))
    cover = {}
    for o, row in enumerate(starts):
        bit = 1 << o
        for off in offsets:
            c = tuple(int(a) + b for a, b in zip(row, off))
            cover[c] = cover.get(c, 0) | bit
    # one representative cell per distinct coverage mask
    masks = {}
    for c, msk in cover.items():
        masks.setdefault(msk, c)
    uniq = sorted(masks, key=lambda x: (-bin(x).count("1"), masks[x]))
    if len(uniq) <= 600:
        keep = []
        for i, a in enumerate(uniq):
            if not any((a | b) == b and a != b for b in uniq[:i]):
                keep.append(a)
        uniq = keep
    cand = [[] for _ in range(m)]
    for idx, msk in enumerate(uniq):
        rest = msk
        while rest:
            low = rest & -rest
            cand[low.bit_length() - 1].append(idx)
            rest ^= low
    full = (1 << m) - 1

    def greedy(uncovered):
        picked = []
        while uncovered:
            best = max(range(len(uniq)), key=lambda i: bin(uniq[i] & uncovered).count("1"))
            picked.append(best)
            uncovered &= ~uniq[best]
        return picked

    best_sol = greedy(full)

    def lower_bound(uncovered):
        used, lb, rest = 0, 0, uncovered
        while rest:
            low = rest & -rest
            o = low.bit_length() - 1
            rest ^= low
            reach = 0
            for i in cand[o]:
                reach |= 1 << i
            if not (reach & used):
                used |= reach
                lb += 1
        return lb

    def rec(uncovered, chosen):
        nonlocal best_sol
        if not uncovered:
            if len(chosen) < len(best_sol):
                best_sol = list(chosen)
            return
        if len(chosen) + lower_bound(uncovered) >= len(best_sol):
            return
        rest, pick, pick_n = uncovered, None, None
        while rest:
            low = rest & -rest
            o = low.bit_length() - 1
            rest ^= low
            if pick_n is None or len(cand[o]) < pick_n:
                pick, pick_n = o, len(cand[o])
        for i in sorted(cand[pick], key=lambda i: -bin(uniq[i] & uncovered).count("1")):
            chosen.append(i)
            rec(uncovered & ~uniq[i], chosen)
            chosen.pop()

    rec(full, [])
    return [masks[uniq[i]] for i in best_sol]


def hitting_set_from_starts(starts: np.ndarray, k: int) -> list:
    cells = []
    for comp in overlap_components(starts, k):
        if comp.shape[0] == 1:
            cells.append(tuple(int(c) + k // 2 for c in comp[0]))
        else:
            cells.extend(_component_hitting(comp, k))
    return sorted(cells)


def hitting_number_nd(A: NdArray, P: Pattern):
    """Exact minimal hitting set of all copies: ``(count, sorted cells)``."""
    starts = find_occurrences(A, P).starts
    cells = hitting_set_from_starts(starts, P.k)
    return len(cells), cells


def _center(start, k) -> tuple:
    return tuple(int(c) + k // 2 for c in start)


def _safe_candidates(W: np.ndarray, start, P: Pattern, sigma: int):
    k = P.k
    c = (k // 2,) * P.ndim
    offsets = sorted(itertools.product(range(k), repeat=P.ndim), key=lambda o: (sum(abs(a - b) for a, b in zip(o, c)), o))
    host = NdArray(W, sigma)
    for off in offsets:
        x = tuple(int(s) + o for s, o in zip(start, off))
        orig = int(W[x])
        for v in range(sigma):
            if v == orig:
                continue
            W[x] = v
            bad = len(occurrences_containing(host.with_values(W), P, x)) > 0
            W[x] = orig
            if not bad:
                return x, v
    raise NoSafeFlip(f"every single change inside the copy at {tuple(int(s) for s in start)} creates a copy")


def safe_flip_nd(A: NdArray, copy_start, P: Pattern):
    """A change inside the copy that destroys it and creates no other copy.

    Candidates are tried from the center outwards; each is checked by a local
    rescan of the ``(2k - 1)``-box around the changed cell.
    """
    start = tuple(int(c) for c in copy_start)
    k = P.k
    sl = tuple(slice(s, s + k) for s in start)
    if any(s + k > n for s, n in zip(start, A.dims)) or not np.array_equal(A.values[sl], P.values):
        raise UsageError(f"no copy of the pattern starts at {start}")
    sigma = max(A.sigma, P.sigma)
    return _safe_candidates(A.values.copy(), start, P, sigma)


class IterationCapExceeded(RuntimeError):
    pass


@dataclass
class ProcedureTrace:
    phase1: list = field(default_factory=list)
    phase2: list = field(default_factory=list)
    flips: FlipSet = field(default_factory=FlipSet)
    created: list = field(default_factory=list)
    iterations: int = 0

    @property
    def bound_ok(self) -> bool:
        d = len(self.phase1[0]) if self.phase1 else 0
        return len(self.phase2) <= 2**d * len(self.phase1)


def deletion_procedure_nd(A: NdArray, P: Pattern) -> ProcedureTrace:
    """Two-phase removal of all copies.

    Phase 1 flips the center of the first remaining original copy and drops
    every original copy containing that cell, recording the copies the flip
    creates. Phase 2 destroys each created copy with a safe flip.
    """
    d, k = P.ndim, P.k
    if A.ndim != d:
        raise UsageError("pattern and array dimensions differ")
    sigma = max(A.sigma, P.sigma)
    host = NdArray(A.values, sigma)
    W = host.values.copy()
    missing = sorted(set(range(sigma)) - set(np.unique(P.values).tolist()))
    cap = alpha(d) * A.size
    trace = ProcedureTrace()

    remaining = sorted(find_occurrences(host, P))
    pending = []
    while remaining:
        trace.iterations += 1
        if trace.iterations > cap:
            raise IterationCapExceeded(f"more than {cap} flips")
        Q = remaining[0]
        x = _center(Q, k)
        W[x] = missing[0] if missing else (int(W[x]) + 1) % sigma
        trace.phase1.append(x)
        remaining = [q for q in remaining if not all(q[i] <= x[i] < q[i] + k for i in range(d))]
        new = sorted(occurrences_containing(host.with_values(W), P, x))
        pending.extend(new)
        trace.created.extend(new)

    while True:
        while pending:
            trace.iterations += 1
            if trace.iterations > cap:
                raise IterationCapExceeded(f"more than {cap} flips")
            Q = pending.pop(0)
            sl = tuple(slice(s, s + k) for s in Q)
            if not np.array_equal(W[sl], P.values):
                continue
            x, v = _safe_candidates(W, Q, P, sigma)
            W[x] = v
            trace.phase2.append(x)
        left = sorted(find_occurrences(host.with_values(W), P))
        if not left:
            break
        pending.extend(left)

    changed = np.argwhere(W != host.values)
    trace.flips = FlipSet(tuple((tuple(int(c) for c in x), int(W[tuple(x)])) for x in changed))
    return trace


def half_independent(x, y, k) -> bool:
    return any(abs(a - b) >= k / 2 for a, b in zip(x, y))


def max_half_independent_set(A: NdArray, P: Pattern) -> int:
    """Largest set of copies whose starts pairwise differ by ``>= k/2`` on some axis."""
    k = P.k
    occ = sorted(find_occurrences(A, P))
    m = len(occ)
    conflict = [0] * m
    for i in range(m):
        for j in range(i + 1, m):
            if not half_independent(occ[i], occ[j], k):
                conflict[i] |= 1 << j
                conflict[j] |= 1 << i
    best = 0

    def rec(avail, size):
        nonlocal best
        if not avail:
            best = max(best, size)
            return
        if size + bin(avail).count("1") <= best:
            return
        low = avail & -avail
        i = low.bit_length() - 1
        rec(avail & ~conflict[i] & ~low, size + 1)
        rec(avail & ~low, size)

    rec((1 << m) - 1, 0)
    return best


def has_cycle(P: Pattern, t) -> bool:
    """Whether entries agree whenever coordinates agree modulo ``|t_i|`` on every axis.

    A zero component demands equal coordinates on that axis. Overlapping
    copies at offset ``t`` imply this only for axis-aligned ``t``; in general
    they imply :func:`has_period`.
    """
    t = tuple(int(c) for c in (t if not np.isscalar(t) else (t,)))
    if len(t) != P.ndim:
        raise UsageError("offset dimension differs from pattern dimension")
    v = P.values
    k = P.k
    for axis, step in enumerate(t):
        step = abs(step)
        if step == 0 or step >= k:
            continue
        a = np.take(v, np.arange(0, k - step), axis=axis)
        b = np.take(v, np.arange(step, k), axis=axis)
        if not np.array_equal(a, b):
            return False
    return True


def has_period(P: Pattern, t) -> bool:
    """Whether ``P[x] == P[x + t]`` whenever both ``x`` and ``x + t`` lie in the pattern."""
    t = tuple(int(c) for c in (t if not np.isscalar(t) else (t,)))
    if len(t) != P.ndim:
        raise UsageError("offset dimension differs from pattern dimension")
    k = P.k
    if any(abs(c) >= k for c in t):
        return True
    a = tuple(slice(max(0, -c), k - max(0, c)) for c in t)
    b = tuple(slice(max(0, c), k - max(0, -c)) for c in t)
    return bool(np.array_equal(P.values[a], P.values[b]))
