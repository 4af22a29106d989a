import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from patfree import _kernels as K
from patfree.core import NdArray, Pattern, UsageError
from patfree.exact1d import distance_exact_1d
from patfree.harness import gen_planted_1d, gen_planted_nd
from patfree.sampler import (
    approx_distance_1d,
    approx_distance_nd,
    calibrate_almost_homo,
    max_workers,
    resolve_seed,
    tolerant_test_1d,
    tolerant_test_almost_homo_1d,
    tolerant_test_nd,
)

DIAG = Pattern(np.eye(2, dtype=np.uint8), 2)
Z4 = Pattern(np.zeros((4, 4), dtype=np.uint8), 2)


def _window_mean(S, P, L):
    """Mean hitting count over every cyclic start, seam straddlers excluded."""
    n = S.size
    starts = np.arange(n)
    rows = S.values[(starts[:, None] + np.arange(L)) % n].astype(np.int64)
    seams = np.where(starts + L > n, n - starts, 0).astype(np.int64)
    p = K.as_kernel_array(P.values)
    return K.window_hitting_counts(rows, seams, p, K.kmp_failure(p)).mean()


def test_zero_string_gives_zero_estimate():
    S = NdArray(np.zeros(3000, dtype=np.uint8), 2)
    P = Pattern.from_string("1001")
    for seed in range(5):
        rep = approx_distance_1d(S, P, seed=seed)
        assert rep.estimate == 0.0
        assert rep.guarantee[0] == 0.0


def test_query_count_matches_config():
    S = NdArray(np.random.default_rng(1).integers(0, 2, 5000).astype(np.uint8), 2)
    P = Pattern.from_string("1001")
    rep = approx_distance_1d(S, P, tau=0.25, seed=3)
    cfg = rep.config
    assert cfg.side == math.ceil(3 / 0.25 * 4)
    assert cfg.t == math.ceil(3.0 / (16 * cfg.delta**2))
    assert rep.queries == cfg.t * cfg.side == cfg.expected_queries
    assert rep.counts.size == cfg.t
    assert rep.estimate == pytest.approx(rep.counts.mean() / cfg.side)


def test_saturated_string_band():
    n = 3000
    S = NdArray.from_string("10" * (n // 2))
    P = Pattern.from_string("101")
    eps = float(distance_exact_1d(S, P).relative)
    assert eps > 0.2
    tau, delta = 0.25, 1 / 12
    inside = 0
    for seed in range(100):
        Y = approx_distance_1d(S, P, tau=tau, delta=delta, seed=seed).estimate
        inside += (1 - tau) * eps - delta <= Y <= eps + delta
    assert inside >= 90


@settings(max_examples=60)
@given(bits=st.lists(st.integers(0, 1), min_size=40, max_size=64), tau=st.sampled_from([0.5, 0.75, 1.0]))
def test_mean_over_all_starts_is_bracketed(bits, tau):
    S = NdArray(np.array(bits, dtype=np.uint8), 2)
    P = Pattern.from_string("101")
    L = math.ceil(3 / tau * P.k)
    if L > S.size:
        return
    eps = float(distance_exact_1d(S, P).relative)
    mean = _window_mean(S, P, L) / L
    assert mean <= eps + 1e-12
    assert mean >= (1 - tau) * eps - 1e-12


def test_same_seed_same_report():
    S, _ = gen_planted_1d(20000, Pattern.from_string("1001"), 150, seed=2)
    P = Pattern.from_string("1001")
    a = approx_distance_1d(S, P, seed=11)
    b = approx_distance_1d(S, P, seed=11)
    assert a.estimate == b.estimate
    np.testing.assert_array_equal(a.counts, b.counts)


def test_resolve_seed():
    assert resolve_seed(5) == 5
    s = resolve_seed(None)
    assert 0 <= s < 2**64


def test_errors():
    S = NdArray(np.zeros(100, dtype=np.uint8), 2)
    with pytest.raises(UsageError):
        approx_distance_1d(S, Pattern.from_string("100"))
    with pytest.raises(UsageError):
        approx_distance_1d(NdArray(np.zeros(40, np.uint8), 2), Pattern.from_string("1001"), tau=0.25)
    with pytest.raises(UsageError):
        approx_distance_1d(NdArray(np.zeros(5000, np.uint8), 2), Pattern.from_string("1001"), delta=0.5)
    with pytest.raises(UsageError):
        tolerant_test_1d(S, Pattern.from_string("1001"), 0.02, 0.01)


def test_unknown_small_needs_force():
    A = NdArray(np.indices((40, 40)).sum(0) % 2, 2)
    A = NdArray(1 - A.values, 2)
    with pytest.raises(UsageError, match="force"):
        approx_distance_nd(A, DIAG, tau=0.5)
    rep = approx_distance_nd(A, DIAG, tau=0.5, seed=0, force=True)
    assert rep.estimate > 0


def test_tolerant_accepts_zero_string():
    S = NdArray(np.zeros(200000, dtype=np.uint8), 2)
    P = Pattern.from_string("1001")
    for seed in range(10):
        v = tolerant_test_1d(S, P, 0.005, 0.02, seed=seed)
        assert v.accept and v.statistic == 0.0
        assert v.accept == (v.statistic < v.threshold)


def test_tolerant_rejects_planted_far():
    P = Pattern.from_string("1001")
    S, dv = gen_planted_1d(100000, P, 2500, seed=4)
    assert dv.relative >= 0.02
    rejects = sum(not tolerant_test_1d(S, P, 0.005, 0.02, seed=s).accept for s in range(20))
    assert rejects >= 14


def test_nd_queries_and_bracket():
    A, h = gen_planted_nd((128, 128), Z4, 60, seed=1)
    rep = approx_distance_nd(A, Z4, tau=0.5, seed=5)
    cfg = rep.config
    assert cfg.side == 16
    assert rep.queries == cfg.t * cfg.side**2
    lo, hi = rep.deletion_bracket
    assert hi == pytest.approx(20 * lo)


def test_nd_band_on_planted():
    A, h = gen_planted_nd((128, 128), Z4, 60, seed=1)
    eps = h / A.size
    tau = 0.5
    delta = 1 / (4 * 16)
    inside = 0
    for seed in range(20):
        Y = approx_distance_nd(A, Z4, tau=tau, seed=seed).estimate
        inside += (1 - tau) ** 2 * eps - delta <= Y <= eps + delta
    assert inside >= 18


def test_nd_thread_count_does_not_change_result(monkeypatch):
    A, _ = gen_planted_nd((96, 96), Z4, 40, seed=2)
    monkeypatch.setenv("PATFREE_THREADS", "1")
    one = approx_distance_nd(A, Z4, seed=9)
    monkeypatch.setenv("PATFREE_THREADS", "4")
    four = approx_distance_nd(A, Z4, seed=9)
    np.testing.assert_array_equal(one.counts, four.counts)


def test_max_workers_env(monkeypatch):
    monkeypatch.setenv("PATFREE_THREADS", "3")
    assert max_workers() == 3
    monkeypatch.setenv("PATFREE_THREADS", "lots")
    with pytest.raises(UsageError):
        max_workers()


def test_nd_tester_rejects_far_and_accepts_free():
    A, h = gen_planted_nd((256, 256), Z4, 256, seed=3)
    assert h / A.size >= 0.0039
    free = NdArray(np.ones((256, 256), dtype=np.uint8), 2)
    far_rej = sum(not tolerant_test_nd(A, Z4, 0.0039, 0.5, seed=s).accept for s in range(5))
    free_acc = sum(tolerant_test_nd(free, Z4, 0.0039, 0.5, seed=s).accept for s in range(5))
    assert far_rej >= 4 and free_acc == 5


def test_nd_deletion_scale_threshold():
    A = NdArray(np.ones((256, 256), dtype=np.uint8), 2)
    v = tolerant_test_nd(A, Z4, 0.08, 0.5, seed=0, scale="deletion")
    assert v.details["eps_hitting"] == pytest.approx(0.08 / 20)
    with pytest.raises(UsageError):
        tolerant_test_nd(A, Z4, 0.08, 0.5, scale="other")


def test_almost_homo_accepts_homogeneous_strings():
    P = Pattern.from_string("1000")
    for fill in (0, 1):
        S = NdArray(np.full(50000, fill, dtype=np.uint8), 2)
        for seed in range(5):
            assert tolerant_test_almost_homo_1d(S, P, 0.01, seed=seed).accept


def test_almost_homo_rejects_many_evidences():
    P = Pattern.from_string("1000")
    S = NdArray.from_string("1000" * 12500)
    assert all(not tolerant_test_almost_homo_1d(S, P, 0.05, seed=s).accept for s in range(5))


def test_almost_homo_handles_flipped_pattern():
    P = Pattern.from_string("0001")
    S = NdArray.from_string("0001" * 12500)
    v = tolerant_test_almost_homo_1d(S, P, 0.05, seed=1)
    assert not v.accept


def test_calibration_separates():
    cal = calibrate_almost_homo(4, 0.02, 1.0)
    assert cal.success >= 0.99
    assert cal.p_far > cal.p_close
    assert 1 <= cal.threshold <= cal.repetitions
