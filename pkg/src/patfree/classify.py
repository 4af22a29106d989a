"""Pattern classification: homogeneous, almost homogeneous, removable.

Binary almost homogeneous patterns are never removable; every other 1D
pattern is. In two or more dimensions the same dichotomy is only known for
side ``k >= 3 * 2**d``; smaller patterns are reported as ``UNKNOWN_SMALL``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .core import NdArray, Pattern, UsageError


class Kind(str, Enum):
    HOMOGENEOUS = "Homogeneous"
    ALMOST_HOMOGENEOUS = "AlmostHomogeneous"
    REMOVABLE = "Removable"
    NOT_REMOVABLE = "NotRemovable"
    UNKNOWN_SMALL = "UnknownSmall"


@dataclass(frozen=True)
class AlmostHomogeneous:
    corner: tuple
    special: int
    background: int


@dataclass(frozen=True)
class Classification:
    """Outcome of :func:`classify`.

    ``kind`` is the removability verdict (Removable, NotRemovable or
    UnknownSmall); ``structure`` records whether the pattern is homogeneous or
    almost homogeneous. ``guaranteed`` says whether a theorem covers the case.
    """

    kind: Kind
    guaranteed: bool
    reason: str
    structure: Optional[Kind] = None
    almost_homogeneous: Optional[AlmostHomogeneous] = None
    witness: Optional[tuple] = field(default=None, compare=False, repr=False)

    @property
    def removable(self) -> bool:
        return self.kind is Kind.REMOVABLE

    def to_record(self) -> dict:
        rec = {
            "kind": self.kind.value,
            "guaranteed": self.guaranteed,
            "reason": self.reason,
            "structure": self.structure.value if self.structure else None,
        }
        if self.almost_homogeneous is not None:
            ah = self.almost_homogeneous
            rec["corner"] = list(ah.corner)
            rec["special"] = ah.special
            rec["background"] = ah.background
        rec["witness_available"] = self.witness is not None or self.kind is Kind.NOT_REMOVABLE
        return rec


def removability_threshold(d: int) -> int:
    """Smallest side for which the multidimensional dichotomy is proven."""
    return 3 * 2**d


def is_homogeneous(P: NdArray) -> bool:
    v = P.values
    return bool((v == v.flat[0]).all())


def is_almost_homogeneous(P: NdArray) -> Optional[AlmostHomogeneous]:
    """Return the deviating corner and values, or None.

    A pattern qualifies when exactly one entry differs from all the others and
    that entry sits at a corner. For a two-cell pattern both entries deviate;
    the corner holding the larger symbol is reported as special.
    """
    v = P.values
    if v.size < 2:
        return None
    symbols, counts = np.unique(v, return_counts=True)
    if len(symbols) != 2:
        return None
    if v.size == 2:
        special, background = int(symbols[1]), int(symbols[0])
    else:
        if 1 not in counts:
            return None
        special = int(symbols[int(np.argmin(counts))])
        background = int(symbols[int(np.argmax(counts))])
    corner = tuple(int(c) for c in np.argwhere(v == special)[0])
    k = P.dims[0]
    if any(c not in (0, k - 1) for c in corner):
        return None
    return AlmostHomogeneous(corner, special, background)


def remark_pattern(d: int) -> Pattern:
    """The ``2 x ... x 2`` pattern that is zero exactly on the first-axis face 0."""
    if d < 2:
        raise UsageError("this pattern needs d >= 2")
    P = np.ones((2,) * d, dtype=np.uint8)
    P[0] = 0
    return Pattern(P, 2)


def remark_host(d: int) -> NdArray:
    """``4 x ... x 4`` host whose copy at ``(1, ..., 1)`` cannot be destroyed safely."""
    if d < 2:
        raise UsageError("this host needs d >= 2")
    M = np.ones((4,) * d, dtype=np.uint8)
    for x in itertools.product(range(4), repeat=d):
        rest = x[1:]
        if (
            x[0] == 0
            or (x[0] == 1 and all(c in (1, 2) for c in rest))
            or (x[0] == 2 and any(c in (0, 3) for c in rest))
        ):
            M[x] = 0
    return NdArray(M, 2)


def remark_witness_d2plus(d: int) -> tuple:
    """Pattern, host and designated copy start showing small sides can fail."""
    return remark_pattern(d), remark_host(d), (1,) * d


def classify(P: Pattern) -> Classification:
    if not isinstance(P, Pattern):
        P = Pattern.from_array(P)
    d, k, sigma = P.ndim, P.k, P.sigma
    present = np.unique(P.values)
    homogeneous = len(present) == 1
    ah = None if homogeneous else is_almost_homogeneous(P)
    structure = Kind.HOMOGENEOUS if homogeneous else (Kind.ALMOST_HOMOGENEOUS if ah else None)

    def result(kind, guaranteed, reason, witness=None):
        return Classification(kind, guaranteed, reason, structure, ah, witness)

    if len(present) < sigma:
        return result(Kind.REMOVABLE, True, "symbol absent from pattern")
    if sigma == 2:
        if ah is not None:
            return result(Kind.NOT_REMOVABLE, True, "binary almost homogeneous")
        if d == 1:
            return result(Kind.REMOVABLE, True, "1D binary, not almost homogeneous")
        if k >= removability_threshold(d):
            return result(Kind.REMOVABLE, True, "binary, not almost homogeneous, large side")
        witness = None
        if k == 2 and P == remark_pattern(d):
            witness = (remark_host(d), (1,) * d)
        return result(Kind.UNKNOWN_SMALL, False, "side below 3*2^d", witness)
    if d == 1:
        return result(Kind.REMOVABLE, True, "1D, alphabet of size >= 3")
    if k >= removability_threshold(d):
        return result(Kind.REMOVABLE, True, "alphabet of size >= 3, large side")
    return result(Kind.UNKNOWN_SMALL, False, "side below 3*2^d")


@dataclass(frozen=True)
class CanonicalForm:
    """Per-axis reversal plus a symbol relabeling taking a pattern to ``1 0...0``.

    ``permutation[s]`` is the new label of symbol ``s``. The transform acts the
    same way on host arrays.
    """

    reversed_axes: tuple
    permutation: tuple
    pattern: Pattern

    def apply(self, A: NdArray) -> NdArray:
        v = A.values
        axes = [i for i, r in enumerate(self.reversed_axes) if r]
        if axes:
            v = np.flip(v, axis=axes)
        perm = np.asarray(self.permutation, dtype=v.dtype)
        return A.with_values(perm[v])

    def invert(self, A: NdArray) -> NdArray:
        inv = np.empty(len(self.permutation), dtype=np.int64)
        inv[list(self.permutation)] = np.arange(len(self.permutation))
        v = inv[A.values]
        axes = [i for i, r in enumerate(self.reversed_axes) if r]
        if axes:
            v = np.flip(v, axis=axes)
        return A.with_values(v)

    def map_coord(self, x, dims) -> tuple:
        """Position of entry ``x`` after the transform (an involution on coords)."""
        return tuple(n - 1 - c if r else c for c, n, r in zip(x, dims, self.reversed_axes))

    def map_box_start(self, start, dims, side) -> tuple:
        """Start of a cubic box of the given side after the transform."""
        return tuple(n - side - c if r else c for c, n, r in zip(start, dims, self.reversed_axes))

    @property
    def identity(self) -> bool:
        return not any(self.reversed_axes) and all(i == s for i, s in enumerate(self.permutation))


def canonicalize_almost_homo(P: Pattern) -> CanonicalForm:
    ah = is_almost_homogeneous(P)
    if ah is None:
        raise UsageError("pattern is not almost homogeneous")
    k = P.k
    reversed_axes = tuple(c == k - 1 and k > 1 for c in ah.corner)
    perm = [None] * P.sigma
    perm[ah.special] = 1
    perm[ah.background] = 0
    rest = iter(s for s in range(P.sigma) if s not in (0, 1))
    for s in range(P.sigma):
        if perm[s] is None:
            perm[s] = next(rest)
    partial = CanonicalForm(reversed_axes, tuple(perm), P)
    return CanonicalForm(reversed_axes, tuple(perm), Pattern.from_array(partial.apply(P)))


def canonicalize_almost_homo_1d(P: Pattern) -> CanonicalForm:
    if P.ndim != 1:
        raise UsageError("expected a 1D pattern")
    return canonicalize_almost_homo(P)


def nonremovable_witness(P: Pattern) -> tuple:
    """Host of side ``2k`` whose designated copy every single change re-creates.

    In canonical orientation the host is background everywhere except the
    special value at ``(0, ..., 0)`` and ``(1, ..., 1)``; the designated copy
    starts at ``(1, ..., 1)``. The result is mapped back to the orientation of
    ``P``. Returns ``(host, copy_start)``.
    """
    if P.sigma != 2:
        raise UsageError("witness construction is for binary patterns")
    cf = canonicalize_almost_homo(P)
    d, k = P.ndim, P.k
    M = np.zeros((2 * k,) * d, dtype=np.uint8)
    M[(0,) * d] = 1
    M[(1,) * d] = 1
    host = cf.invert(NdArray(M, 2))
    start = cf.map_box_start((1,) * d, host.dims, k)
    return host, start
