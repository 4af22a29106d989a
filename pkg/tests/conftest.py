import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from patfree.classify import Kind, classify
from patfree.core import NdArray, Pattern

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def binary_patterns(k):
    for bits in itertools.product((0, 1), repeat=k):
        yield Pattern(np.array(bits, dtype=np.uint8), 2)


def removable_binary_patterns(ks=(3, 4, 5)):
    return [P for k in ks for P in binary_patterns(k) if classify(P).kind is Kind.REMOVABLE]


def almost_homogeneous_binary_patterns(ks=(3, 4, 5)):
    return [P for k in ks for P in binary_patterns(k) if classify(P).kind is Kind.NOT_REMOVABLE]


@st.composite
def binary_strings(draw, min_size=1, max_size=40):
    bits = draw(st.lists(st.integers(0, 1), min_size=min_size, max_size=max_size))
    return NdArray(np.array(bits, dtype=np.uint8), 2)


@st.composite
def binary_arrays_2d(draw, min_side=2, max_side=7):
    r = draw(st.integers(min_side, max_side))
    c = draw(st.integers(min_side, max_side))
    bits = draw(st.lists(st.integers(0, 1), min_size=r * c, max_size=r * c))
    return NdArray(np.array(bits, dtype=np.uint8).reshape(r, c), 2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
