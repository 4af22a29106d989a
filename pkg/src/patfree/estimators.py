"""scikit-learn style wrappers around the exact algorithms and testers.

Each estimator is configured with a pattern; ``fit`` validates and classifies
it, and ``transform``/``predict`` work on a batch of host arrays. A 2D numpy
array counts as a batch of 1D strings; pass a list for d-D hosts.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_fraction, check_hosts, check_pattern
from .classify import Kind, classify
from .core import NdArray, UsageError, apply_flips
from .exact1d import deletion_set_1d, distance_exact_1d
from .ndcombin import deletion_procedure_nd, hitting_number_nd
from .sampler import (
    approx_distance_1d,
    approx_distance_nd,
    resolve_seed,
    tolerant_test_1d,
    tolerant_test_almost_homo_1d,
    tolerant_test_nd,
)


class _PatternEstimator(BaseEstimator):
    def fit(self, X=None, y=None):
        """Validate and classify the pattern; ``X`` is ignored."""
        self.pattern_ = check_pattern(self.pattern)
        self.classification_ = classify(self.pattern_)
        return self

    def _hosts(self, X):
        check_is_fitted(self, "pattern_")
        hosts = check_hosts(X, self.pattern_.sigma)
        for A in hosts:
            if A.ndim != self.pattern_.ndim:
                raise UsageError(f"host of dimension {A.ndim} for a pattern of dimension {self.pattern_.ndim}")
        return hosts

    def _seeds(self, m: int) -> list:
        base = resolve_seed(self.random_state)
        self.seed_ = base
        return [(base + i) & 0xFFFFFFFFFFFFFFFF for i in range(m)]


class DeletionDistance(_PatternEstimator, TransformerMixin):
    """Relative distance of each host to freeness of ``pattern``.

    Parameters
    ----------
    pattern : array-like or Pattern
    method : {"exact", "approx"}
        ``"exact"`` gives the deletion number for strings and the hitting
        number (a lower bound) for d-D arrays. ``"approx"`` runs the block
        sampler.
    tau, delta : float, optional
        Sampler parameters; ignored for ``"exact"``.
    random_state : int, optional
        Host ``i`` uses seed ``random_state + i``.
    """

    def __init__(self, pattern=None, method: str = "exact", tau: Optional[float] = None,
                 delta: Optional[float] = None, random_state: Optional[int] = None):
        self.pattern = pattern
        self.method = method
        self.tau = tau
        self.delta = delta
        self.random_state = random_state

    def transform(self, X) -> np.ndarray:
        hosts = self._hosts(X)
        P = self.pattern_
        if self.method == "exact":
            out = []
            for A in hosts:
                if A.ndim == 1:
                    out.append(float(distance_exact_1d(A, P).relative))
                else:
                    out.append(hitting_number_nd(A, P)[0] / A.size)
            return np.asarray(out, dtype=float)
        if self.method != "approx":
            raise UsageError(f"unknown method {self.method!r}")
        out = []
        for A, s in zip(hosts, self._seeds(len(hosts))):
            if A.ndim == 1:
                tau = 0.25 if self.tau is None else check_fraction("tau", self.tau)
                out.append(approx_distance_1d(A, P, tau=tau, delta=self.delta, seed=s).estimate)
            else:
                tau = 0.5 if self.tau is None else check_fraction("tau", self.tau)
                out.append(approx_distance_nd(A, P, tau=tau, delta=self.delta, seed=s).estimate)
        return np.asarray(out, dtype=float)


class PatternFreenessTester(_PatternEstimator):
    """Tolerant tester; ``predict`` returns 1 for accept (close) and 0 for reject (far).

    For strings, removable patterns use ``(eps1, eps2)`` and almost homogeneous
    patterns use ``eps2`` with tolerance constant ``c``. For d-D arrays the
    tester uses ``eps2`` and ``tau``.
    """

    def __init__(self, pattern=None, eps1: float = 0.005, eps2: float = 0.02, tau: float = 0.5, c: float = 1.0,
                 random_state: Optional[int] = None):
        self.pattern = pattern
        self.eps1 = eps1
        self.eps2 = eps2
        self.tau = tau
        self.c = c
        self.random_state = random_state

    def fit(self, X=None, y=None):
        super().fit(X, y)
        check_fraction("eps2", self.eps2)
        check_fraction("eps1", self.eps1, low_open=False, high=self.eps2)
        return self

    def _verdict(self, A: NdArray, seed: int):
        P = self.pattern_
        if A.ndim > 1:
            return tolerant_test_nd(A, P, self.eps2, self.tau, seed=seed)
        if self.classification_.kind is Kind.NOT_REMOVABLE:
            return tolerant_test_almost_homo_1d(A, P, self.eps2, c=self.c, seed=seed)
        return tolerant_test_1d(A, P, self.eps1, self.eps2, seed=seed)

    def decision_function(self, X) -> np.ndarray:
        """Test statistic per host; larger means farther from freeness."""
        hosts = self._hosts(X)
        return np.asarray([self._verdict(A, s).statistic for A, s in zip(hosts, self._seeds(len(hosts)))])

    def predict(self, X) -> np.ndarray:
        hosts = self._hosts(X)
        verdicts = [self._verdict(A, s) for A, s in zip(hosts, self._seeds(len(hosts)))]
        self.queries_ = np.asarray([v.queries for v in verdicts])
        return np.asarray([int(v.accept) for v in verdicts])


class PatternRepair(_PatternEstimator, TransformerMixin):
    """Make each host free of ``pattern`` with few changes.

    After ``transform`` the attribute ``flipsets_`` holds the change set used
    for every host.
    """

    def __init__(self, pattern=None):
        self.pattern = pattern

    def flipsets(self, X) -> list:
        P = self.pattern_
        return [deletion_set_1d(A, P) if A.ndim == 1 else deletion_procedure_nd(A, P).flips for A in self._hosts(X)]

    def transform(self, X) -> list:
        hosts = self._hosts(X)
        self.flipsets_ = self.flipsets(hosts)
        return [apply_flips(A, F) for A, F in zip(hosts, self.flipsets_)]
