"""Input coercion shared by the estimator classes."""

from __future__ import annotations

from numbers import Real
from typing import Optional

import numpy as np

from .core import NdArray, Pattern, UsageError


def check_host(X, sigma: Optional[int] = None) -> NdArray:
    """Coerce a digit string, array-like or :class:`NdArray` to an ``NdArray``.

    The alphabet is widened to ``sigma`` when given, never narrowed.
    """
    if isinstance(X, NdArray):
        A = X
    elif isinstance(X, str):
        A = NdArray.from_string(X.strip())
    else:
        arr = np.asarray(X)
        if arr.dtype.kind == "f":
            if not np.all(np.isfinite(arr)) or not np.all(arr == np.round(arr)):
                raise UsageError("host values must be integers")
            arr = arr.astype(np.int64)
        A = NdArray(arr)
    if sigma is not None and A.sigma < sigma:
        A = NdArray(A.values, sigma)
    return A


def check_pattern(P, sigma: Optional[int] = None) -> Pattern:
    if isinstance(P, Pattern) and (sigma is None or P.sigma == sigma):
        return P
    return Pattern.from_array(check_host(P, sigma))


def check_hosts(X, sigma: Optional[int] = None) -> list:
    """A batch of hosts; a single host is wrapped in a list."""
    if isinstance(X, (str, NdArray)):
        return [check_host(X, sigma)]
    if isinstance(X, np.ndarray) and X.dtype != object:
        return [check_host(row, sigma) for row in X] if X.ndim >= 2 else [check_host(X, sigma)]
    return [check_host(x, sigma) for x in X]


def check_fraction(name: str, value, low: float = 0.0, high: float = 1.0, low_open: bool = True) -> float:
    if not isinstance(value, Real):
        raise UsageError(f"{name} must be a real number")
    value = float(value)
    ok = (low < value if low_open else low <= value) and value <= high
    if not ok:
        raise UsageError(f"{name}={value} outside {'(' if low_open else '['}{low}, {high}]")
    return value
