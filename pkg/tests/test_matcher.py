import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from patfree.core import NdArray, Pattern, UsageError
from patfree.matcher import (
    find_occurrences,
    find_occurrences_1d,
    find_occurrences_nd,
    occurrences_containing,
    occurrences_in_window,
)
from patfree.oracle import naive_occurrences

from conftest import binary_arrays_2d, binary_strings


def test_1d_examples():
    assert find_occurrences_1d(NdArray.from_string("1010101"), Pattern.from_string("101")).positions.tolist() == [0, 2, 4]
    assert len(find_occurrences_1d(NdArray.from_string("0000"), Pattern.from_string("01"))) == 0
    assert find_occurrences_1d(NdArray.from_string("000"), Pattern.from_string("000")).positions.tolist() == [0]
    assert len(find_occurrences_1d(NdArray.from_string("00"), Pattern.from_string("000"))) == 0


def test_nd_examples():
    A = np.zeros((3, 3), dtype=np.uint8)
    A[1:, 1:] = 1
    assert list(find_occurrences_nd(NdArray(A, 2), Pattern(np.ones((2, 2), np.uint8), 2))) == [(1, 1)]
    assert len(find_occurrences_nd(NdArray(np.zeros((2, 5), np.uint8)), Pattern(np.zeros((3, 3), np.uint8)))) == 0
    assert len(find_occurrences_nd(NdArray(np.zeros((4, 4), np.uint8)), Pattern(np.zeros((2, 2), np.uint8)))) == 9


@settings(max_examples=300)
@given(binary_strings(max_size=60), binary_strings(max_size=6))
def test_kmp_matches_naive(S, P):
    P = Pattern(P.values, 2)
    assert find_occurrences_1d(S, P).as_set() == naive_occurrences(S, P)


@settings(max_examples=200)
@given(binary_arrays_2d(), st.integers(1, 3), st.data())
def test_nd_matches_naive(A, k, data):
    bits = data.draw(st.lists(st.integers(0, 1), min_size=k * k, max_size=k * k))
    P = Pattern(np.array(bits, dtype=np.uint8).reshape(k, k), 2)
    occ = find_occurrences(A, P)
    assert occ.as_set() == naive_occurrences(A, P)
    rows = [tuple(r) for r in occ.starts.tolist()]
    assert rows == sorted(rows)


@settings(max_examples=200)
@given(binary_strings(min_size=5, max_size=40), binary_strings(min_size=2, max_size=5))
def test_overlapping_copies_imply_period(S, P):
    P = Pattern(P.values, 2)
    pos = find_occurrences_1d(S, P).positions.tolist()
    k = P.k
    for a in pos:
        for b in pos:
            if a < b < a + k:
                t = b - a
                assert np.array_equal(P.values[t:], P.values[: k - t])


def test_window_interior_equals_plain_box():
    S = NdArray.from_string("0010100101")
    P = Pattern.from_string("101")
    occ = occurrences_in_window(S, 1, 6, P)
    assert occ.as_set() == naive_occurrences(NdArray(S.values[1:7], 2), P)


def test_window_excludes_seam_straddlers():
    S = NdArray.from_string("101" + "0" * 5)
    P = Pattern.from_string("101")
    n = S.size
    # reads "0101"; local 1 is the genuine copy at host position 0
    occ = occurrences_in_window(S, n - 1, 4, P)
    assert occ.as_set() == {(1,)}
    # reads "1010"; the match at local 0 exists only through the wrap
    T = NdArray.from_string("01" + "0" * 4 + "1")
    occ = occurrences_in_window(T, T.size - 1, 4, P)
    assert len(occ) == 0


def test_window_whole_array():
    S = NdArray.from_string("10101001")
    P = Pattern.from_string("101")
    assert occurrences_in_window(S, 0, S.size, P).as_set() == find_occurrences(S, P).as_set()


def test_window_too_small():
    with pytest.raises(UsageError):
        occurrences_in_window(NdArray.from_string("10101"), 0, 2, Pattern.from_string("101"))


def test_window_2d_seam():
    A = np.zeros((5, 5), dtype=np.uint8)
    A[4, 4] = A[0, 0] = 1
    P = Pattern(np.array([[1, 0], [0, 1]], dtype=np.uint8), 2)
    A = NdArray(A, 2)
    # the diagonal pair via wrap is not a genuine copy
    assert len(occurrences_in_window(A, (4, 4), (3, 3), P)) == 0


@settings(max_examples=100)
@given(binary_arrays_2d(min_side=3), st.data())
def test_occurrences_containing_is_local_filter(A, data):
    P = Pattern(np.array([[0, 1], [1, 0]], dtype=np.uint8), 2)
    x = (data.draw(st.integers(0, A.dims[0] - 1)), data.draw(st.integers(0, A.dims[1] - 1)))
    expected = {q for q in naive_occurrences(A, P) if all(q[i] <= x[i] < q[i] + 2 for i in range(2))}
    assert occurrences_containing(A, P, x).as_set() == expected
