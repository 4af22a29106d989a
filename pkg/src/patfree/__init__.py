"""Distance to pattern freeness for strings and d-dimensional arrays.

Exact algorithms, hitting-set bounds, sublinear testers and brute-force
references for the problem of changing few entries of an array so that a
fixed pattern no longer occurs in it.
"""

from .classify import Classification, Kind, classify
from .core import (
    BudgetExceeded,
    CountedView,
    DistanceValue,
    FlipSet,
    NdArray,
    NoSafeFlip,
    Pattern,
    UsageError,
    apply_flips,
)
from .estimators import DeletionDistance, PatternFreenessTester, PatternRepair
from .exact1d import deletion_set_1d, distance_exact_1d, hitting_number_1d, safe_flip_1d
from .matcher import OccurrenceSet, find_occurrences
from .ndcombin import deletion_procedure_nd, hitting_number_nd, safe_flip_nd
from .sampler import (
    approx_distance_1d,
    approx_distance_nd,
    tolerant_test_1d,
    tolerant_test_almost_homo_1d,
    tolerant_test_nd,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "Classification",
    "CountedView",
    "DeletionDistance",
    "DistanceValue",
    "FlipSet",
    "Kind",
    "NdArray",
    "NoSafeFlip",
    "OccurrenceSet",
    "Pattern",
    "PatternFreenessTester",
    "PatternRepair",
    "UsageError",
    "apply_flips",
    "approx_distance_1d",
    "approx_distance_nd",
    "classify",
    "deletion_procedure_nd",
    "deletion_set_1d",
    "distance_exact_1d",
    "find_occurrences",
    "hitting_number_1d",
    "hitting_number_nd",
    "safe_flip_1d",
    "safe_flip_nd",
    "tolerant_test_1d",
    "tolerant_test_almost_homo_1d",
    "tolerant_test_nd",
]
