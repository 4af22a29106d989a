"""Instance generators with measured distances, trial runners and benchmarks."""

from __future__ import annotations

import json
import math
import statistics
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .core import DistanceValue, NdArray, Pattern, UsageError, apply_flips
from .exact1d import deletion_set_1d, distance_exact_1d, effective_pattern
from .matcher import find_occurrences
from .ndcombin import deletion_procedure_nd, hitting_number_nd


def _clear_extra_copies(v: np.ndarray, P: Pattern, sigma: int, plant_starts: set, planted: np.ndarray) -> None:
    """Change gap cells until the planted copies are the only copies.

    Plants sit at least ``2k`` apart, so any other copy touches a cell outside
    every plant and can be destroyed there without touching a plant.
    """
    rng = np.random.default_rng(0)
    guard = 4 * v.size
    while True:
        extra = [q for q in find_occurrences(NdArray(v, sigma), P) if q not in plant_starts]
        if not extra:
            return
        for q in extra:
            box = tuple(slice(c, c + P.k) for c in q)
            cells = [tuple(int(a) + b for a, b in zip(q, off)) for off in np.argwhere(~planted[box])]
            if not cells or not np.array_equal(v[box], P.values):
                continue
            guard -= 1
            if guard < 0:
                raise RuntimeError("could not isolate the planted copies")
            x = cells[int(rng.integers(len(cells)))]
            choices = [a for a in range(sigma) if a != v[x]]
            v[x] = choices[int(rng.integers(len(choices)))]


def gen_planted_1d(n: int, P: Pattern, m: int, seed: int, density: float = 0.5):
    """Random ``P``-free background with ``m`` planted copies spaced ``2k`` apart.

    Copies formed by a plant together with background cells are removed by
    changing background cells, so the planted copies are the only ones.
    Returns ``(S, distance)`` where the distance is measured on the final
    string, not assumed from ``m``.
    """
    k = P.k
    if m < 0 or m * 2 * k > n:
        raise UsageError(f"cannot plant {m} copies spaced {2 * k} apart in length {n}")
    P = effective_pattern(NdArray(np.zeros(1, np.uint8), P.sigma), P)
    rng = np.random.default_rng(seed)
    sigma = P.sigma
    if sigma == 2:
        bg = (rng.random(n) < density).astype(np.uint8)
    else:
        bg = rng.integers(0, sigma, size=n).astype(np.uint8)
    S = NdArray(bg, sigma)
    S = apply_flips(S, deletion_set_1d(S, P))
    v = S.values.copy()
    slots = rng.choice(n // (2 * k), size=m, replace=False) if m else np.zeros(0, np.int64)
    planted = np.zeros(n, dtype=bool)
    starts = set()
    for s in np.sort(slots):
        v[s * 2 * k : s * 2 * k + k] = P.values
        planted[s * 2 * k : s * 2 * k + k] = True
        starts.add((int(s) * 2 * k,))
    _clear_extra_copies(v, P, sigma, starts, planted)
    S = NdArray(v, sigma)
    return S, distance_exact_1d(S, P)


def gen_planted_nd(dims: Sequence[int], P: Pattern, m: int, seed: int, density: float = 0.5):
    """d-D analog of :func:`gen_planted_1d`; returns ``(A, hitting number)`` measured exactly."""
    k, d = P.k, P.ndim
    dims = tuple(int(x) for x in dims)
    if len(dims) != d:
        raise UsageError("dims and pattern dimension differ")
    grid = tuple(n // (2 * k) for n in dims)
    slots_total = int(np.prod(grid))
    if m < 0 or m > slots_total:
        raise UsageError(f"cannot plant {m} copies on a grid of {slots_total} slots")
    rng = np.random.default_rng(seed)
    sigma = P.sigma
    if sigma == 2:
        bg = (rng.random(dims) < density).astype(np.uint8)
    else:
        bg = rng.integers(0, sigma, size=dims).astype(np.uint8)
    A = NdArray(bg, sigma)
    A = apply_flips(A, deletion_procedure_nd(A, P).flips)
    v = A.values.copy()
    planted = np.zeros(dims, dtype=bool)
    starts = set()
    for flat in rng.choice(slots_total, size=m, replace=False):
        g = np.unravel_index(int(flat), grid)
        sl = tuple(slice(c * 2 * k, c * 2 * k + k) for c in g)
        v[sl] = P.values
        planted[sl] = True
        starts.add(tuple(int(c) * 2 * k for c in g))
    _clear_extra_copies(v, P, sigma, starts, planted)
    A = NdArray(v, sigma)
    h, _ = hitting_number_nd(A, P)
    return A, h


# -- lower-bound distributions -------------------------------------------------


@dataclass(frozen=True)
class LbInstanceSpec:
    n: int
    k: int
    eps: float
    kind: str = "C"

    def __post_init__(self):
        if self.k % 2 or self.k < 2:
            raise UsageError("k must be even")
        if self.n % self.k:
            raise UsageError("n must be divisible by k")
        if self.kind not in ("B", "C"):
            raise UsageError("kind must be 'B' or 'C'")
        if self.ones > self.intervals:
            raise UsageError("2 eps n exceeds the number of intervals n/k")

    @property
    def intervals(self) -> int:
        return self.n // self.k

    @property
    def ones(self) -> int:
        return int(round(2 * self.eps * self.n))

    def pattern(self) -> Pattern:
        h = self.k // 2
        return Pattern(np.array([0] * (h - 1) + [1] + [0] * h, dtype=np.uint8), 2)


def _lb_ones(spec: LbInstanceSpec, rng) -> np.ndarray:
    half = spec.k // 2
    chosen = rng.choice(spec.intervals, size=spec.ones, replace=False)
    return np.sort(chosen * spec.k + half + rng.integers(0, half, size=spec.ones))


def lb_sample(spec: LbInstanceSpec, seed) -> NdArray:
    """A string from distribution B (all zeros) or C (one 1 in the right half of chosen intervals)."""
    v = np.zeros(spec.n, dtype=np.uint8)
    if spec.kind == "C":
        v[_lb_ones(spec, np.random.default_rng(seed))] = 1
    return NdArray(v, 2)


def lb_default_positions(spec: LbInstanceSpec, seed: int = 0) -> np.ndarray:
    size = int(math.floor(1 / (13 * spec.eps)))
    return np.sort(np.random.default_rng(seed).choice(spec.n, size=size, replace=False))


def lb_hit_probability(spec: LbInstanceSpec, X: Iterable[int]) -> float:
    """Exact probability that a C-sample has a 1 at some position of ``X``."""
    half = spec.k // 2
    per = {}
    for x in set(int(x) for x in X):
        if x % spec.k >= half:
            per[x // spec.k] = per.get(x // spec.k, 0) + 1
    miss = [Fraction(half - c, half) for c in per.values()]
    # elementary symmetric sums of the per-interval miss probabilities
    e = [Fraction(1)] + [Fraction(0)] * len(miss)
    for q in miss:
        for j in range(len(e) - 1, 0, -1):
            e[j] += e[j - 1] * q
    N, r, T = spec.intervals, spec.ones, len(miss)
    total = math.comb(N, r)
    p_clear = sum(e[j] * Fraction(math.comb(N - T, r - j), total) for j in range(T + 1) if r - j >= 0)
    return float(1 - p_clear)


@dataclass
class LbResult:
    frequency: float
    hits: int
    trials: int
    size: int
    union_bound: float
    exact: float
    sigma: float

    def within_bound(self) -> bool:
        return self.frequency <= self.union_bound + 3 * self.sigma


def lb_experiment(n: int, k: int, eps: float, X: Optional[Iterable[int]] = None, trials: int = 10_000, seed=0) -> LbResult:
    """Fraction of C-samples in which some position of ``X`` reads 1."""
    spec = LbInstanceSpec(n, k, eps, "C")
    X = lb_default_positions(spec) if X is None else np.asarray(sorted(set(int(x) for x in X)), dtype=np.int64)
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(trials):
        ones = _lb_ones(spec, rng)
        hits += bool(np.isin(X, ones, assume_unique=True).any())
    bound = 4 * eps * X.size
    sigma = math.sqrt(max(bound * (1 - bound), 0.0) / trials) if bound < 1 else 0.0
    return LbResult(hits / trials, hits, trials, int(X.size), bound, lb_hit_probability(spec, X), sigma)


# -- trials --------------------------------------------------------------------


@dataclass(frozen=True)
class TrialRecord:
    seed: int
    label: str
    verdict: str
    queries: int
    nanos: int

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=False)


@dataclass
class TrialSummary:
    records: list

    def rate(self, label: str, verdict: str) -> float:
        rs = [r for r in self.records if r.label == label]
        return sum(r.verdict == verdict for r in rs) / len(rs) if rs else float("nan")

    def mean_queries(self, label: Optional[str] = None) -> float:
        rs = [r for r in self.records if label is None or r.label == label]
        return float(np.mean([r.queries for r in rs])) if rs else float("nan")

    def by_label(self) -> dict:
        out = {}
        for lab in dict.fromkeys(r.label for r in self.records):
            out[lab] = {"accept": self.rate(lab, "accept"), "reject": self.rate(lab, "reject"),
                        "trials": sum(r.label == lab for r in self.records), "mean_queries": self.mean_queries(lab)}
        return out

    def write_jsonl(self, path) -> None:
        with open(path, "a", encoding="utf-8") as fh:
            for r in self.records:
                fh.write(r.to_json() + "\n")


def run_trials(tester: Callable, generator: Callable, labels: Sequence[str], N: int, seed: int = 0) -> TrialSummary:
    """Run ``tester(instance, seed)`` on ``generator(label, seed)`` for ``N`` seeds per label.

    Trial ``i`` uses seed ``seed + i``; records come out in label then seed order.
    """
    records = []
    for label in labels:
        for i in range(N):
            s = seed + i
            inst = generator(label, s)
            t0 = time.perf_counter_ns()
            v = tester(inst, s)
            nanos = time.perf_counter_ns() - t0
            records.append(TrialRecord(s, label, "accept" if v.accept else "reject", int(v.queries), nanos))
    return TrialSummary(records)


# -- scaling ---------------------------------------------------------------------


def _bench_input(op: str, n: int, rng):
    if op == "distance_exact_1d":
        return NdArray(rng.integers(0, 2, n).astype(np.uint8), 2), Pattern.from_string("1001")
    if op == "almost_homo":
        return NdArray(rng.integers(0, 2, n).astype(np.uint8), 2), Pattern.from_string("1000")
    if op == "approx_1d":
        return NdArray(rng.integers(0, 2, n).astype(np.uint8), 2), Pattern.from_string("1001")
    raise UsageError(f"unknown benchmark op {op!r}")


def _bench_call(op: str, S, P):
    if op in ("distance_exact_1d", "almost_homo"):
        return distance_exact_1d(S, P)
    from .sampler import approx_distance_1d

    return approx_distance_1d(S, P, seed=0)


def scaling_bench(op: str = "distance_exact_1d", sizes: Sequence[int] = (10**6, 2 * 10**6), reps: int = 7, seed: int = 0):
    """Median wall time per size, plus ratios between consecutive sizes.

    Each op is run once on a small input first so compilation is excluded.
    """
    rng = np.random.default_rng(seed)
    S0, P0 = _bench_input(op, 1000, rng)
    _bench_call(op, S0, P0)
    rows = []
    for n in sizes:
        S, P = _bench_input(op, int(n), rng)
        times = []
        for _ in range(reps):
            t0 = time.perf_counter()
            _bench_call(op, S, P)
            times.append(time.perf_counter() - t0)
        rows.append({"n": int(n), "median_s": statistics.median(times)})
    ratios = [rows[i + 1]["median_s"] / rows[i]["median_s"] for i in range(len(rows) - 1)]
    return {"op": op, "rows": rows, "ratios": ratios}


def measured_distance(S: NdArray, P: Pattern) -> DistanceValue:
    return distance_exact_1d(S, P)
