"""Sublinear distance estimation and tolerant testing by sampling blocks.

Every sampler draws its random choices from ``numpy.random.default_rng(seed)``
before reading anything and reads the input only through a
:class:`~patfree.core.CountedView`, so reports carry exact query counts and
are reproducible from the seed.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from . import _kernels as K
from .classify import Kind, canonicalize_almost_homo, classify
from .core import CountedView, NdArray, Pattern, UsageError, ceil_side
from .matcher import find_occurrences, straddles_seam
from .ndcombin import alpha, hitting_set_from_starts

DEFAULT_CHEBYSHEV_C = 3.0
ALMOST_HOMO_REPETITIONS = 48


def resolve_seed(seed: Optional[int]) -> int:
    if seed is None:
        return int(np.random.SeedSequence().entropy) & 0xFFFFFFFFFFFFFFFF
    return int(seed) & 0xFFFFFFFFFFFFFFFF


def max_workers() -> int:
    env = os.environ.get("PATFREE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"PATFREE_THREADS must be an integer, got {env!r}")
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SamplerConfig:
    k: int
    d: int
    tau: float
    delta: float
    beta: float
    side: int
    t: int
    seed: int
    chebyshev_c: float = DEFAULT_CHEBYSHEV_C

    @property
    def block_cells(self) -> int:
        return self.side**self.d

    @property
    def expected_queries(self) -> int:
        return self.t * self.block_cells


@dataclass
class EstimateReport:
    """Result of a block-sampling run.

    ``estimate`` is the mean block hitting count divided by the block size.
    ``guarantee`` is the interval the unknown relative hitting number lies in
    whenever the run succeeded (probability >= 2/3).
    """

    estimate: float
    counts: np.ndarray
    queries: int
    config: SamplerConfig
    guarantee: tuple
    deletion_bracket: Optional[tuple] = None
    wall_time: float = 0.0

    def to_record(self) -> dict:
        rec = {
            "estimate": self.estimate,
            "queries": self.queries,
            "guarantee": list(self.guarantee),
            "config": asdict(self.config),
            "blocks": int(self.counts.size),
        }
        if self.deletion_bracket is not None:
            rec["deletion_bracket"] = list(self.deletion_bracket)
        return rec


@dataclass
class TestVerdict:
    accept: bool
    threshold: float
    statistic: float
    queries: int
    seed: int
    details: dict = field(default_factory=dict)

    __test__ = False

    def to_record(self) -> dict:
        return {
            "accept": self.accept,
            "threshold": self.threshold,
            "statistic": self.statistic,
            "queries": self.queries,
            "seed": self.seed,
            **self.details,
        }


def _require_removable(S: NdArray, P: Pattern, force: bool) -> Pattern:
    sigma = max(S.sigma, P.sigma)
    P = P if P.sigma == sigma else Pattern(P.values, sigma)
    cls = classify(P)
    if cls.kind is Kind.REMOVABLE or (force and cls.kind is Kind.UNKNOWN_SMALL):
        return P
    if cls.kind is Kind.UNKNOWN_SMALL:
        raise UsageError("removability of this pattern is not established; pass force=True to proceed")
    raise UsageError(f"pattern is {cls.kind.value}; block sampling needs a removable pattern")


def _sample_1d(S: NdArray, P: Pattern, cfg: SamplerConfig):
    n, L = S.size, cfg.side
    if L > n:
        raise UsageError(f"string of length {n} shorter than block length {L}")
    rng = np.random.default_rng(cfg.seed)
    starts = rng.integers(0, n, size=cfg.t)
    view = CountedView(S)
    rows = np.ascontiguousarray(view.read_windows_1d(starts, L), dtype=np.int64)
    seams = np.where(starts + L > n, n - starts, 0).astype(np.int64)
    p = K.as_kernel_array(P.values)
    counts = K.window_hitting_counts(rows, seams, p, K.kmp_failure(p))
    return counts, view.queries


def _block_hitting(view: CountedView, start, side: int, P: Pattern) -> int:
    w = view.read_window(start, side)
    occ = find_occurrences(w.array, P)
    starts = occ.starts[~straddles_seam(occ.starts, w.seams, P.k)]
    return len(hitting_set_from_starts(starts, P.k))


def _sample_nd(A: NdArray, P: Pattern, cfg: SamplerConfig):
    L = cfg.side
    if any(L > n for n in A.dims):
        raise UsageError(f"array dims {A.dims} smaller than block side {L}")
    rng = np.random.default_rng(cfg.seed)
    starts = np.stack([rng.integers(0, n, size=cfg.t) for n in A.dims], axis=1)
    view = CountedView(A)
    jobs = [tuple(int(c) for c in row) for row in starts]
    workers = min(max_workers(), len(jobs)) if jobs else 1
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            counts = list(ex.map(lambda s: _block_hitting(view, s, L, P), jobs))
    else:
        counts = [_block_hitting(view, s, L, P) for s in jobs]
    return np.asarray(counts, dtype=np.int64), view.queries


def _check_unit(name, value, lo_open=0.0, hi=1.0):
    if not (lo_open < value <= hi):
        raise UsageError(f"{name}={value} outside ({lo_open}, {hi}]")


def approx_distance_1d(S: NdArray, P: Pattern, tau: float = 0.25, delta: Optional[float] = None, seed=None,
                       chebyshev_c: float = DEFAULT_CHEBYSHEV_C, force: bool = False) -> EstimateReport:
    """Estimate the relative deletion number of a string for a removable pattern.

    With probability at least 2/3 the estimate lies in
    ``[(1 - tau) * eps - delta, eps + delta]`` where ``eps`` is the true
    relative distance. Uses ``ceil(c / (k delta)^2)`` cyclic blocks of about
    ``3 k / tau`` cells.
    """
    if S.ndim != 1:
        raise UsageError("approx_distance_1d needs a 1D string")
    P = _require_removable(S, P, force)
    k = P.k
    _check_unit("tau", tau)
    delta = 1.0 / (4 * k) if delta is None else float(delta)
    if not 0 < delta < 1.0 / k:
        raise UsageError(f"delta={delta} outside (0, 1/k)")
    beta = 3.0 / tau
    cfg = SamplerConfig(k, 1, tau, delta, beta, ceil_side(beta, k), math.ceil(chebyshev_c / (k * k * delta * delta)),
                        resolve_seed(seed), chebyshev_c)
    t0 = time.perf_counter()
    counts, queries = _sample_1d(S, P, cfg)
    Y = float(counts.mean()) / cfg.side
    guarantee = (max(0.0, Y - delta), min(1.0 / k, (Y + delta) / (1 - tau)) if tau < 1 else 1.0 / k)
    return EstimateReport(Y, counts, queries, cfg, guarantee, wall_time=time.perf_counter() - t0)


def tolerant_test_1d(S: NdArray, P: Pattern, eps1: float, eps2: float, seed=None,
                     chebyshev_c: float = DEFAULT_CHEBYSHEV_C, force: bool = False) -> TestVerdict:
    """Accept strings ``eps1``-close to freeness, reject ``eps2``-far ones.

    Each side holds with probability at least 2/3; the query count depends on
    ``eps1`` and ``eps2`` only, not on ``k`` or ``n``.
    """
    if S.ndim != 1:
        raise UsageError("tolerant_test_1d needs a 1D string")
    if not 0 <= eps1 < eps2 <= 1:
        raise UsageError("need 0 <= eps1 < eps2 <= 1")
    P = _require_removable(S, P, force)
    k = P.k
    delta = (eps2 - eps1) / 4
    tau = (eps2 - eps1) / (4 * eps2)
    beta = 3.0 / tau
    cfg = SamplerConfig(k, 1, tau, delta, beta, ceil_side(beta, k), math.ceil(chebyshev_c * eps2 / (k * delta * delta)),
                        resolve_seed(seed), chebyshev_c)
    counts, queries = _sample_1d(S, P, cfg)
    Y = float(counts.mean()) / cfg.side
    threshold = (eps1 + eps2) / 2
    return TestVerdict(Y < threshold, threshold, Y, queries, cfg.seed,
                       {"eps1": eps1, "eps2": eps2, "config": asdict(cfg)})


def approx_distance_nd(A: NdArray, P: Pattern, tau: float = 0.5, delta: Optional[float] = None, seed=None,
                       chebyshev_c: float = DEFAULT_CHEBYSHEV_C, force: bool = False) -> EstimateReport:
    """Estimate the relative hitting number of a d-dimensional array.

    The deletion number lies between the hitting number and ``alpha_d`` times
    it; ``deletion_bracket`` carries ``(Y, alpha_d * Y)``.
    """
    P = _require_removable(A, P, force)
    if A.ndim != P.ndim:
        raise UsageError("pattern and array dimensions differ")
    k, d = P.k, P.ndim
    _check_unit("tau", tau)
    cap = 1.0 / k**d
    delta = cap / 4 if delta is None else float(delta)
    if not 0 < delta <= cap:
        raise UsageError(f"delta={delta} outside (0, 1/k^d]")
    beta = 2.0 / tau
    cfg = SamplerConfig(k, d, tau, delta, beta, ceil_side(beta, k),
                        math.ceil(chebyshev_c / (k ** (2 * d) * delta * delta)), resolve_seed(seed), chebyshev_c)
    t0 = time.perf_counter()
    counts, queries = _sample_nd(A, P, cfg)
    Y = float(counts.mean()) / cfg.block_cells
    shrink = (1 - tau) ** d
    guarantee = (max(0.0, Y - delta), min(cap, (Y + delta) / shrink) if shrink > 0 else cap)
    return EstimateReport(Y, counts, queries, cfg, guarantee, (Y, alpha(d) * Y), time.perf_counter() - t0)


def tolerant_test_nd(A: NdArray, P: Pattern, eps: float, tau: float, seed=None, scale: str = "hitting",
                     chebyshev_c: float = DEFAULT_CHEBYSHEV_C, force: bool = False) -> TestVerdict:
    """Tolerant tester for d-dimensional arrays.

    On the hitting scale it accepts arrays with relative hitting number at most
    ``(1 - tau)**d * eps`` and rejects arrays with at least ``eps``. With
    ``scale="deletion"`` the hitting hypothesis is ``eps / alpha_d`` so that it
    becomes a ``((1 - tau)**d eps / alpha_d, eps)`` tester for the deletion
    number.

    Blocks are sized so the estimator's boundary loss moves a far input only
    halfway towards the close hypothesis; the threshold sits between the two.
    """
    P = _require_removable(A, P, force)
    if A.ndim != P.ndim:
        raise UsageError("pattern and array dimensions differ")
    _check_unit("eps", eps)
    _check_unit("tau", tau)
    if scale not in ("hitting", "deletion"):
        raise UsageError("scale must be 'hitting' or 'deletion'")
    k, d = P.k, P.ndim
    eps_h = eps if scale == "hitting" else eps / alpha(d)
    low = (1 - tau) ** d * eps_h
    shrink = (1 + (1 - tau) ** d) / 2
    tau_in = 1 - shrink ** (1.0 / d)
    far_mean = shrink * eps_h
    threshold = (low + far_mean) / 2
    delta = (far_mean - low) / 2
    beta = 2.0 / tau_in
    cfg = SamplerConfig(k, d, tau_in, delta, beta, ceil_side(beta, k),
                        math.ceil(chebyshev_c * eps_h / (k**d * delta * delta)), resolve_seed(seed), chebyshev_c)
    counts, queries = _sample_nd(A, P, cfg)
    Y = float(counts.mean()) / cfg.block_cells
    return TestVerdict(Y < threshold, threshold, Y, queries, cfg.seed,
                       {"eps": eps, "eps_hitting": eps_h, "tau": tau, "scale": scale, "config": asdict(cfg)})


# -- almost homogeneous patterns -------------------------------------------------


def _detector_runs(read_single, read_blocks, n: int, k: int, runs: int, n_single: int, n_blocks: int, rng) -> np.ndarray:
    """Fire flags of ``runs`` independent evidence detectors.

    A detector fires when some sampled one lies left of a sampled run of
    ``k - 1`` zeros starting within the first ``k`` offsets of a block.
    """
    L = 2 * k - 1
    singles = rng.integers(0, n, size=(runs, n_single))
    bstarts = rng.integers(0, n - L + 1, size=(runs, n_blocks))
    svals = read_single(singles.ravel()).reshape(runs, n_single)
    blocks = read_blocks(bstarts.ravel(), L).reshape(runs, n_blocks, L)
    big = np.iinfo(np.int64).max
    first_one = np.where(svals == 1, singles, big).min(axis=1)
    zeros = (blocks == 0).astype(np.int64)
    csum = np.concatenate([np.zeros((runs, n_blocks, 1), dtype=np.int64), np.cumsum(zeros, axis=2)], axis=2)
    offs = np.arange(k)
    run_ok = (csum[:, :, offs + k - 1] - csum[:, :, offs]) == k - 1
    last_off = np.where(run_ok, offs, -1).max(axis=2)
    last_j = np.where(last_off >= 0, bstarts + last_off, -1).max(axis=1)
    return last_j > first_one


def _synthetic_family(kind: str, n: int, k: int, units: int) -> np.ndarray:
    s = np.zeros(n, dtype=np.uint8)
    if kind == "spread":
        s[np.linspace(0, n - k, units, dtype=np.int64)] = 1
    elif kind == "front":
        s[:units] = 1
    elif kind == "tail":
        z = units * (k - 1)
        s[n - z - units : n - z] = 1
    elif kind == "ones":
        s[: n - units * (k - 1)] = 1
    elif kind == "tail_interleaved":
        base = n - units * k
        s[base + k * np.arange(units)] = 1
    else:
        raise ValueError(kind)
    return s


_FAMILIES = ("spread", "front", "tail", "ones", "tail_interleaved")


def _binom_tail_ge(R: int, p: float, thr: int) -> float:
    return sum(math.comb(R, j) * p**j * (1 - p) ** (R - j) for j in range(thr, R + 1))


@dataclass(frozen=True)
class AlmostHomoCalibration:
    c_prime: float
    threshold: int
    repetitions: int
    p_far: float
    p_close: float
    success: float


@lru_cache(maxsize=64)
def calibrate_almost_homo(k: int, eps: float, c: float, repetitions: int = ALMOST_HOMO_REPETITIONS,
                          trials: int = 400, seed: int = 20240917) -> AlmostHomoCalibration:
    """Choose the query budget constant and fire-count threshold by simulation.

    Synthetic strings at measured distance ``eps`` (far) and
    ``eps / (16 + c)`` (close) in several arrangements give the lowest far and
    highest close single-run fire rates; the smallest budget whose best
    threshold separates both sides with probability >= 0.99 wins.
    """
    from .exact1d import distance_almost_homo_1d

    n = int(math.ceil(64 * k / eps))
    P = Pattern(np.array([1] + [0] * (k - 1), dtype=np.uint8), 2)
    far_units = int(math.ceil(eps * n))
    close_units = int(math.floor(eps / (16 + c) * n))
    strings = []
    for fam in _FAMILIES:
        for units, far in ((far_units, True), (close_units, False)):
            s = _synthetic_family(fam, n, k, units)
            dist = distance_almost_homo_1d(NdArray(s, 2), P).absolute
            if far and dist < eps * n or not far and dist > eps / (16 + c) * n:
                raise RuntimeError(f"calibration family {fam} at wrong distance {dist}")
            strings.append((s, far))
    rng = np.random.default_rng(seed)
    best = None
    for c_prime in (2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64):
        m = c_prime / eps
        n_single = int(math.ceil(m / 3))
        n_blocks = int(math.ceil(m / (3 * k)))
        p_far, p_close = 1.0, 0.0
        for s, far in strings:
            fires = _detector_runs(lambda idx: s[idx], lambda st, L: s[st[:, None] + np.arange(L)],
                                   n, k, trials, n_single, n_blocks, rng)
            rate = float(fires.mean())
            if far:
                p_far = min(p_far, rate)
            else:
                p_close = max(p_close, rate)
        thr, succ = 1, 0.0
        for cand in range(1, repetitions + 1):
            v = min(_binom_tail_ge(repetitions, p_far, cand), 1 - _binom_tail_ge(repetitions, p_close, cand))
            if v > succ:
                thr, succ = cand, v
        cal = AlmostHomoCalibration(float(c_prime), thr, repetitions, p_far, p_close, succ)
        if best is None or succ > best.success:
            best = cal
        if succ >= 0.99:
            return cal
    return best


def tolerant_test_almost_homo_1d(S: NdArray, P: Pattern, eps: float, c: float = 1.0, seed=None,
                                 repetitions: int = ALMOST_HOMO_REPETITIONS) -> TestVerdict:
    """Tester for almost homogeneous patterns with tolerance factor ``16 + c``.

    Rejects strings ``eps``-far from freeness and accepts strings
    ``eps / (16 + c)``-close, each with probability at least 2/3, using
    ``O(1 / eps)`` queries.
    """
    if S.ndim != 1 or P.ndim != 1:
        raise UsageError("expected 1D string and pattern")
    if S.sigma != 2 or P.sigma != 2:
        raise UsageError("almost homogeneous tester requires binary inputs")
    cf = canonicalize_almost_homo(P)
    k = P.k
    if not 0 < eps <= 1.0 / k:
        raise UsageError(f"eps={eps} outside (0, 1/k]")
    if c <= 0:
        raise UsageError("c must be positive")
    n = S.size
    if n < 2 * k - 1:
        raise UsageError("string shorter than a detector block")
    cal = calibrate_almost_homo(k, float(eps), float(c), repetitions)
    m = cal.c_prime / eps
    n_single = int(math.ceil(m / 3))
    n_blocks = int(math.ceil(m / (3 * k)))
    seed = resolve_seed(seed)
    rng = np.random.default_rng(seed)
    view = CountedView(cf.apply(S))
    fires = _detector_runs(view.read_positions_1d, view.read_windows_1d, n, k, repetitions, n_single, n_blocks, rng)
    count = int(fires.sum())
    return TestVerdict(count < cal.threshold, cal.threshold / repetitions, count / repetitions, view.queries, seed,
                       {"eps": eps, "c": c, "fires": count, "calibration": asdict(cal)})
