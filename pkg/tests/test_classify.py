import itertools

import numpy as np
import pytest

from patfree.classify import (
    Kind,
    canonicalize_almost_homo,
    canonicalize_almost_homo_1d,
    classify,
    is_almost_homogeneous,
    nonremovable_witness,
    remark_host,
    remark_pattern,
    remark_witness_d2plus,
    removability_threshold,
)
from patfree.core import NdArray, Pattern, UsageError
from patfree.oracle import naive_occurrences, template_is_rigid

from conftest import almost_homogeneous_binary_patterns, binary_patterns


def P(s):
    return Pattern.from_string(s)


def test_is_almost_homogeneous_examples():
    ah = is_almost_homogeneous(P("100"))
    assert ah.corner == (0,) and ah.special == 1 and ah.background == 0
    assert is_almost_homogeneous(P("101")) is None
    assert is_almost_homogeneous(P("000")) is None
    ah2 = is_almost_homogeneous(Pattern(np.array([[1, 0], [0, 0]])))
    assert ah2.corner == (0, 0)


def test_classify_examples():
    assert classify(P("101")).kind is Kind.REMOVABLE
    assert classify(P("1000")).kind is Kind.NOT_REMOVABLE
    c = classify(remark_pattern(2))
    assert c.kind is Kind.UNKNOWN_SMALL and not c.guaranteed and c.witness is not None


def test_classify_decision_table():
    assert classify(Pattern([0, 1], sigma=3)).kind is Kind.REMOVABLE
    homo = classify(P("000"))
    assert homo.kind is Kind.REMOVABLE and homo.structure is Kind.HOMOGENEOUS
    assert classify(P("01")).kind is Kind.NOT_REMOVABLE
    assert classify(P("11")).kind is Kind.REMOVABLE
    assert classify(P("1")).kind is Kind.REMOVABLE
    assert classify(Pattern([0, 1, 2])).kind is Kind.REMOVABLE
    checker = Pattern(np.indices((4, 4)).sum(axis=0) % 2)
    assert classify(checker).kind is Kind.UNKNOWN_SMALL
    big = Pattern(np.indices((12, 12)).sum(axis=0) % 2)
    assert classify(big).kind is Kind.REMOVABLE and classify(big).guaranteed
    assert classify(Pattern(np.arange(9).reshape(3, 3) % 3)).kind is Kind.UNKNOWN_SMALL


def test_threshold():
    assert removability_threshold(2) == 12
    assert removability_threshold(3) == 24


def test_classify_is_pure():
    p = P("1011")
    assert classify(p) == classify(p)


def test_canonical_examples():
    assert canonicalize_almost_homo_1d(P("1000")).identity
    cf = canonicalize_almost_homo_1d(P("0001"))
    assert cf.reversed_axes == (True,) and cf.pattern == P("1000")
    cf = canonicalize_almost_homo_1d(P("0111"))
    assert cf.reversed_axes == (False,) and cf.pattern == P("1000")
    with pytest.raises(UsageError):
        canonicalize_almost_homo_1d(P("101"))


@pytest.mark.parametrize("pat", ["100", "001", "011", "110", "1000", "0111"])
def test_canonical_roundtrip(pat, rng):
    cf = canonicalize_almost_homo(P(pat))
    for _ in range(20):
        S = NdArray(rng.integers(0, 2, 15).astype(np.uint8), 2)
        assert cf.invert(cf.apply(S)) == S
    assert cf.invert(cf.pattern) == P(pat)


def test_canonical_roundtrip_2d(rng):
    v = np.zeros((3, 3), dtype=np.uint8)
    v[2, 0] = 1
    cf = canonicalize_almost_homo(Pattern(1 - v))
    A = NdArray(rng.integers(0, 2, (5, 6)).astype(np.uint8), 2)
    assert cf.invert(cf.apply(A)) == A
    assert cf.pattern.values[0, 0] == 1 and cf.pattern.values.sum() == 1


def test_witness_example_100():
    host, start = nonremovable_witness(P("100"))
    assert host.to_string() == "110000" and start == (1,)


@pytest.mark.parametrize("pat", almost_homogeneous_binary_patterns((3, 4, 5)), ids=lambda p: p.to_string())
def test_witnesses_are_rigid(pat):
    host, start = nonremovable_witness(pat)
    assert start in naive_occurrences(host, pat)
    assert template_is_rigid(host, pat, start)


def test_witness_2d_almost_homogeneous():
    v = np.zeros((3, 3), dtype=np.uint8)
    v[0, 0] = 1
    pat = Pattern(v)
    host, start = nonremovable_witness(pat)
    assert host.dims == (6, 6) and start == (1, 1)
    assert template_is_rigid(host, pat, start)


def test_witness_requires_almost_homogeneous():
    with pytest.raises(UsageError):
        nonremovable_witness(P("101"))


@pytest.mark.parametrize("d", [2, 3])
def test_remark_witness(d):
    pat, host, start = remark_witness_d2plus(d)
    assert pat.k == 2 and host.dims == (4,) * d
    assert template_is_rigid(host, pat, start)


def test_remark_flip_creates_copy_at_even_location():
    pat, host = remark_pattern(2), remark_host(2)
    assert pat.values.tolist() == [[0, 0], [1, 1]]
    for x in itertools.product((1, 2), repeat=2):
        v = host.values.copy()
        v[x] ^= 1
        expected = tuple(2 * (c // 2) for c in x)
        assert expected in naive_occurrences(host.with_values(v), pat)


def test_remark_requires_d2():
    with pytest.raises(UsageError):
        remark_witness_d2plus(1)


def test_almost_homogeneous_corner_invariant():
    for k in (2, 3, 4):
        for pat in binary_patterns(k):
            ah = is_almost_homogeneous(pat)
            if ah is not None:
                assert all(c in (0, k - 1) for c in ah.corner)
