import io as stdio

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from patfree.core import FlipSet, NdArray
from patfree.io import (
    ParseError,
    flipset_from_json,
    flipset_to_json,
    parse_array,
    parse_pattern,
    parse_text,
    read_flipset,
    serialize_array,
    write_array,
)


def test_nda_example():
    A = parse_text("NDA 1\ndims 2\n2 3\nalphabet 2\n0 1 1 0 0 1\n")
    assert A.dims == (2, 3) and A.sigma == 2
    np.testing.assert_array_equal(A.values, [[0, 1, 1], [0, 0, 1]])


def test_digit_runs_and_comments():
    A = parse_text("# fixture\nNDA 1\ndims 1\n6\nalphabet 2\n010\n# middle\n110\n")
    assert A.to_string() == "010110"


def test_raw_string():
    A = parse_text("010110\n", alphabet=2)
    assert A.dims == (6,) and A.to_string() == "010110"


def test_count_mismatch_reports_counts():
    with pytest.raises(ParseError, match="need 6 values, got 5"):
        parse_text("NDA 1\ndims 2\n2 3\nalphabet 2\n0 1 1 0 0\n")


def test_symbol_out_of_range_position():
    with pytest.raises(ParseError) as info:
        parse_text("NDA 1\ndims 1\n3\nalphabet 2\n0 2 1\n")
    assert info.value.line == 5 and info.value.offset == 2


def test_bad_header():
    with pytest.raises(ParseError) as info:
        parse_text("NDA 1\ndimz 1\n3\n")
    assert info.value.line == 2
    with pytest.raises(ParseError):
        parse_text("NDA 2\n")
    with pytest.raises(ParseError):
        parse_text("NDA 1\ndims x\n")


def test_raw_errors():
    with pytest.raises(ParseError):
        parse_text("01a")
    with pytest.raises(ParseError) as info:
        parse_text("0\n013", alphabet=2)
    assert (info.value.line, info.value.offset) == (2, 2)
    with pytest.raises(ParseError):
        parse_text("")


@st.composite
def arrays(draw):
    d = draw(st.integers(1, 3))
    sides = draw(st.lists(st.integers(1, 4), min_size=d, max_size=d))
    sigma = draw(st.integers(2, 12))
    size = int(np.prod(sides))
    vals = draw(st.lists(st.integers(0, sigma - 1), min_size=size, max_size=size))
    return NdArray(np.array(vals).reshape(sides), sigma)


@given(arrays())
def test_roundtrip(A):
    B = parse_text(serialize_array(A))
    assert B == A and B.sigma == A.sigma


def test_file_and_stream(tmp_path):
    A = NdArray(np.array([[1, 0], [0, 1]]), 2)
    path = tmp_path / "a.nda"
    write_array(A, path)
    assert parse_array(path) == A
    assert parse_array(stdio.StringIO(serialize_array(A))) == A
    assert parse_pattern(path).k == 2


def test_flipset_json_roundtrip(tmp_path):
    F = FlipSet((((0, 1), 1), ((2, 3), 0)))
    assert flipset_from_json(flipset_to_json(F)) == F
    path = tmp_path / "f.json"
    path.write_text(flipset_to_json(F))
    assert read_flipset(path) == F
    with pytest.raises(ParseError):
        flipset_from_json('{"flips": [{"coord": [1]}]}')
