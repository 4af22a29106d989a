import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from patfree.core import Pattern, UsageError
from patfree.exact1d import distance_exact_1d
from patfree.harness import (
    LbInstanceSpec,
    gen_planted_1d,
    gen_planted_nd,
    lb_experiment,
    lb_hit_probability,
    lb_sample,
    run_trials,
    scaling_bench,
)
from patfree.matcher import find_occurrences
from patfree.ndcombin import hitting_number_nd
from patfree.sampler import tolerant_test_1d


def test_planted_zero_copies_is_free():
    P = Pattern.from_string("101")
    S, dv = gen_planted_1d(60, P, 0, seed=0)
    assert dv.absolute == 0
    assert len(find_occurrences(S, P)) == 0


def test_planted_small_example():
    P = Pattern.from_string("101")
    for seed in range(30):
        S, dv = gen_planted_1d(60, P, 3, seed=seed)
        assert dv.absolute == 3


@settings(max_examples=80)
@given(p=st.sampled_from(["101", "1001", "0110", "1011", "000", "11011"]), m=st.integers(0, 5),
       seed=st.integers(0, 10**6))
def test_planted_distance_is_measured_and_at_most_m(p, m, seed):
    P = Pattern.from_string(p)
    n = 12 * len(p) + 7
    S, dv = gen_planted_1d(n, P, m, seed=seed)
    assert dv == distance_exact_1d(S, P)
    assert dv.absolute <= m
    assert len(find_occurrences(S, P)) == m


def test_planted_infeasible():
    with pytest.raises(UsageError):
        gen_planted_1d(20, Pattern.from_string("101"), 4, seed=0)


def test_planted_nd_measures_hitting_number():
    P = Pattern(np.zeros((3, 3), dtype=np.uint8), 2)
    A, h = gen_planted_nd((30, 30), P, 7, seed=5)
    assert h == hitting_number_nd(A, P)[0] == 7


def test_lb_spec_validation():
    with pytest.raises(UsageError):
        LbInstanceSpec(100, 5, 0.01)
    with pytest.raises(UsageError):
        LbInstanceSpec(101, 4, 0.01)
    with pytest.raises(UsageError):
        LbInstanceSpec(100, 20, 0.1)


def test_lb_b_is_zeros():
    spec = LbInstanceSpec(2000, 20, 0.005, "B")
    assert not lb_sample(spec, 1).values.any()


@pytest.mark.parametrize("seed", range(10))
def test_lb_c_properties(seed):
    spec = LbInstanceSpec(20000, 20, 0.005, "C")
    S = lb_sample(spec, seed)
    ones = np.flatnonzero(S.values)
    assert ones.size == spec.ones == 200
    assert np.all(ones % spec.k >= spec.k // 2)
    assert np.unique(ones // spec.k).size == ones.size
    J = spec.pattern()
    # a one in the last k/2 - 1 cells has no room for the trailing zeros of J
    cut = ones > spec.n - 1 - spec.k // 2
    assert len(find_occurrences(S, J)) == spec.ones - int(cut.sum())
    assert cut.sum() <= 1
    assert distance_exact_1d(S, J).absolute >= spec.eps * spec.n


def test_lb_left_halves_never_hit():
    spec = LbInstanceSpec(20000, 20, 0.005)
    X = np.arange(0, spec.n, spec.k)[:15]
    res = lb_experiment(spec.n, spec.k, spec.eps, X=X, trials=2000, seed=3)
    assert res.hits == 0 and res.exact == 0.0


def test_lb_frequency_matches_exact():
    res = lb_experiment(20000, 20, 0.005, trials=4000, seed=1)
    sd = (res.exact * (1 - res.exact) / res.trials) ** 0.5
    assert abs(res.frequency - res.exact) <= 4 * sd
    assert res.exact <= res.union_bound
    assert res.within_bound()


def test_lb_exact_probability_single_position():
    spec = LbInstanceSpec(200, 10, 0.01)
    # one right-half position: chosen interval with prob ones/intervals, then 1/half
    assert lb_hit_probability(spec, [7]) == pytest.approx(spec.ones / spec.intervals / 5)


def _planted_generator(label, seed):
    P = Pattern.from_string("1001")
    return gen_planted_1d(50000, P, 1300 if label == "far" else 0, seed)[0]


def _tester(S, seed):
    return tolerant_test_1d(S, Pattern.from_string("1001"), 0.005, 0.02, seed=seed)


def test_run_trials_deterministic(tmp_path):
    a = run_trials(_tester, _planted_generator, ["free", "far"], 4, seed=10)
    b = run_trials(_tester, _planted_generator, ["free", "far"], 4, seed=10)
    assert [(r.seed, r.label, r.verdict, r.queries) for r in a.records] == \
        [(r.seed, r.label, r.verdict, r.queries) for r in b.records]
    assert [r.seed for r in a.records] == [10, 11, 12, 13] * 2
    assert a.rate("free", "accept") == 1.0
    assert a.rate("far", "reject") >= 0.75
    assert a.mean_queries() == _tester(_planted_generator("free", 0), 0).queries
    out = tmp_path / "trials.jsonl"
    a.write_jsonl(out)
    lines = out.read_text().splitlines()
    assert len(lines) == 8
    assert list(json.loads(lines[0])) == ["seed", "label", "verdict", "queries", "nanos"]


def test_scaling_bench_structure():
    res = scaling_bench("distance_exact_1d", sizes=(10**4, 2 * 10**4), reps=3)
    assert res["op"] == "distance_exact_1d"
    assert [r["n"] for r in res["rows"]] == [10**4, 2 * 10**4]
    assert len(res["ratios"]) == 1 and res["ratios"][0] > 0
    with pytest.raises(UsageError):
        scaling_bench("nope", sizes=(10,), reps=1)
