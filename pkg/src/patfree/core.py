"""Basic containers: arrays over a finite alphabet, cubic patterns, flip sets,
distances and a query-counting read view."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

MAX_SIGMA = 1 << 16


class UsageError(ValueError):
    """Raised when an operation is called outside its preconditions."""


class NoSafeFlip(RuntimeError):
    """No single-entry change destroys the copy without creating another."""


class BudgetExceeded(RuntimeError):
    """An exhaustive search ran past its declared budget."""


def _dtype_for(sigma: int):
    return np.uint8 if sigma <= 256 else np.uint16


class NdArray:
    """Dense d-dimensional array over the alphabet ``{0, ..., sigma-1}``.

    The values are stored in a read-only numpy array; instances are treated as
    immutable and are safe to share between threads.

    Parameters
    ----------
    values : array-like
        Symbols, any shape with at least one axis.
    sigma : int, optional
        Alphabet size. Defaults to ``max(2, max(values) + 1)``.
    """

    __slots__ = ("_values", "sigma")

    def __init__(self, values, sigma: Optional[int] = None):
        arr = np.asarray(values)
        if arr.ndim == 0:
            raise UsageError("arrays need at least one dimension")
        if arr.size == 0:
            raise UsageError("every side length must be at least 1")
        if arr.dtype.kind not in "iub":
            raise UsageError(f"symbols must be integers, got dtype {arr.dtype}")
        lo, hi = int(arr.min()), int(arr.max())
        if sigma is None:
            sigma = max(2, hi + 1)
        sigma = int(sigma)
        if sigma < 2:
            raise UsageError("alphabet size must be at least 2")
        if sigma > MAX_SIGMA:
            raise UsageError(f"alphabet size above {MAX_SIGMA} is not supported")
        if lo < 0 or hi >= sigma:
            raise UsageError(f"symbol out of range for alphabet of size {sigma}")
        stored = np.array(arr, dtype=_dtype_for(sigma), copy=True)
        stored.setflags(write=False)
        self._values = stored
        self.sigma = sigma

    @classmethod
    def from_string(cls, text: str, sigma: Optional[int] = None) -> "NdArray":
        """Build a 1D array from a string of decimal digits, e.g. ``"0101"``."""
        if not text or not text.isdigit():
            raise UsageError(f"not a digit string: {text!r}")
        return cls(np.frombuffer(text.encode(), dtype=np.uint8) - ord("0"), sigma)

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def dims(self) -> tuple:
        return self._values.shape

    @property
    def ndim(self) -> int:
        return self._values.ndim

    @property
    def size(self) -> int:
        return self._values.size

    def __len__(self):
        return self._values.shape[0]

    def __getitem__(self, x):
        return get(self, x)

    def __eq__(self, other):
        if not isinstance(other, NdArray):
            return NotImplemented
        return (
            type(self) is type(other)
            and self.sigma == other.sigma
            and self.dims == other.dims
            and bool(np.array_equal(self._values, other._values))
        )

    def __hash__(self):
        return hash((type(self).__name__, self.sigma, self.dims, self._values.tobytes()))

    def __repr__(self):
        if self.ndim == 1 and self.sigma <= 10 and self.size <= 64:
            return f"{type(self).__name__}({self.to_string()!r}, sigma={self.sigma})"
        return f"{type(self).__name__}(dims={self.dims}, sigma={self.sigma})"

    def to_string(self) -> str:
        if self.ndim != 1 or self.sigma > 10:
            raise UsageError("digit strings exist only for 1D arrays with sigma <= 10")
        return (self._values.astype(np.uint8) + ord("0")).tobytes().decode()

    def packed(self) -> np.ndarray:
        """Row-major bit-packed copy of a binary array (``np.packbits`` layout)."""
        if self.sigma != 2:
            raise UsageError("packed view exists only for binary arrays")
        return np.packbits(self._values.ravel())

    def with_values(self, values) -> "NdArray":
        return NdArray(values, self.sigma)


class Pattern(NdArray):
    """Cubic ``(k, d)``-array; all side lengths are equal."""

    __slots__ = ()

    def __init__(self, values, sigma: Optional[int] = None):
        super().__init__(values, sigma)
        if len(set(self.dims)) != 1:
            raise UsageError(f"pattern must be cubic, got dims {self.dims}")

    @classmethod
    def from_array(cls, A: NdArray) -> "Pattern":
        return cls(A.values, A.sigma)

    @property
    def k(self) -> int:
        return self.dims[0]

    def with_values(self, values) -> "Pattern":
        return Pattern(values, self.sigma)


def as_coord(x, A: NdArray) -> tuple:
    """Normalize ``x`` to a tuple coordinate of ``A`` and bounds-check it."""
    if isinstance(x, (int, np.integer)):
        x = (int(x),)
    x = tuple(int(c) for c in x)
    if len(x) != A.ndim:
        raise UsageError(f"coordinate {x} has wrong dimension for dims {A.dims}")
    for c, n in zip(x, A.dims):
        if not 0 <= c < n:
            raise UsageError(f"coordinate {x} out of bounds for dims {A.dims}")
    return x


def get(A: NdArray, x) -> int:
    return int(A.values[as_coord(x, A)])


@dataclass(frozen=True)
class FlipSet:
    """Set of ``(coordinate, new value)`` modifications."""

    flips: tuple = ()

    def __post_init__(self):
        flips = tuple((tuple(int(c) for c in coord), int(v)) for coord, v in self.flips)
        coords = [c for c, _ in flips]
        if len(set(coords)) != len(coords):
            raise UsageError("flip set contains a duplicate coordinate")
        object.__setattr__(self, "flips", flips)

    @classmethod
    def from_positions(cls, A: NdArray, positions: Iterable, values=None) -> "FlipSet":
        """Binary convenience: flip each position to the other symbol."""
        positions = [as_coord(p, A) for p in positions]
        if values is None:
            if A.sigma != 2:
                raise UsageError("new values are required for non-binary arrays")
            values = [1 - int(A.values[p]) for p in positions]
        return cls(tuple(zip(positions, values)))

    def __len__(self):
        return len(self.flips)

    def __iter__(self):
        return iter(self.flips)

    def coords(self) -> list:
        return [c for c, _ in self.flips]

    def inverse(self, A: NdArray) -> "FlipSet":
        """Flip set restoring ``A`` after ``self`` has been applied to it."""
        return FlipSet(tuple((c, int(A.values[c])) for c, _ in self.flips))

    def validate(self, A: NdArray) -> None:
        for coord, v in self.flips:
            as_coord(coord, A)
            if not 0 <= v < A.sigma:
                raise UsageError(f"value {v} outside alphabet of size {A.sigma}")
            if int(A.values[coord]) == v:
                raise UsageError(f"flip at {coord} does not change the entry")


def apply_flips(A: NdArray, F: FlipSet) -> NdArray:
    """Return a copy of ``A`` modified at the coordinates of ``F``."""
    if not isinstance(F, FlipSet):
        F = FlipSet(tuple(F))
    F.validate(A)
    out = A.values.copy()
    for coord, v in F:
        out[coord] = v
    return A.with_values(out)


@dataclass(frozen=True)
class DistanceValue:
    """Absolute distance plus the normalizing array size.

    ``absolute`` is exact when ``upper`` is None; otherwise the true value lies
    in ``[absolute, upper]``.
    """

    absolute: int
    size: int
    upper: Optional[int] = None

    def __post_init__(self):
        if self.absolute < 0 or self.absolute > self.size:
            raise UsageError("absolute distance outside [0, size]")
        if self.upper is not None:
            if self.upper < self.absolute or self.upper > self.size:
                raise UsageError("upper bound below lower bound or above size")
            if self.upper == self.absolute:
                object.__setattr__(self, "upper", None)

    @property
    def exact(self) -> bool:
        return self.upper is None

    @property
    def relative(self) -> Fraction:
        return Fraction(self.absolute, self.size)

    @property
    def relative_upper(self) -> Fraction:
        return Fraction(self.absolute if self.upper is None else self.upper, self.size)

    def __int__(self):
        return self.absolute

    def __float__(self):
        return float(self.relative)


@dataclass(frozen=True)
class CyclicWindow:
    """A box extracted with per-axis wraparound.

    ``seams[i]`` is the first window offset on axis ``i`` whose source index
    wrapped to 0, or None if that axis did not wrap.
    """

    array: NdArray
    start: tuple
    seams: tuple


def _window_indices(dims: Sequence[int], start: Sequence[int], sides: Sequence[int]):
    if len(start) != len(dims) or len(sides) != len(dims):
        raise UsageError("start and sides must match the array dimension")
    idx, seams = [], []
    for s, L, n in zip(start, sides, dims):
        if not 1 <= L <= n:
            raise UsageError(f"window side {L} outside [1, {n}]")
        if not 0 <= s < n:
            raise UsageError(f"window start {s} outside [0, {n})")
        idx.append((s + np.arange(L)) % n)
        seams.append(n - s if s + L > n else None)
    return idx, tuple(seams)


def extract_cyclic_window(A: NdArray, start, sides) -> CyclicWindow:
    """Box of the given sides starting at ``start``, indices taken modulo dims."""
    start = as_coord(start, A)
    if isinstance(sides, (int, np.integer)):
        sides = (int(sides),) * A.ndim
    idx, seams = _window_indices(A.dims, start, tuple(sides))
    block = A.values[np.ix_(*idx)]
    return CyclicWindow(A.with_values(block), start, seams)


class CountedView:
    """Read-only view over an array that counts every entry read.

    Repeated reads of the same coordinate are counted each time. The counter is
    guarded by a lock so concurrent readers keep it exact.
    """

    def __init__(self, A: NdArray, track: bool = False):
        self.array = A
        self._count = 0
        self._lock = threading.Lock()
        self.touched: Optional[set] = set() if track else None

    @property
    def queries(self) -> int:
        return self._count

    @property
    def dims(self):
        return self.array.dims

    def _charge(self, n: int, coords=None):
        with self._lock:
            self._count += n
            if self.touched is not None and coords is not None:
                self.touched.update(coords)

    def get(self, x) -> int:
        x = as_coord(x, self.array)
        self._charge(1, (x,))
        return int(self.array.values[x])

    __getitem__ = get

    def read_window(self, start, sides) -> CyclicWindow:
        w = extract_cyclic_window(self.array, start, sides)
        coords = None
        if self.touched is not None:
            idx, _ = _window_indices(self.array.dims, w.start, w.array.dims)
            coords = [tuple(int(c) for c in t) for t in np.stack(np.meshgrid(*idx, indexing="ij"), -1).reshape(-1, self.array.ndim)]
        self._charge(w.array.size, coords)
        return w

    def read_windows_1d(self, starts: np.ndarray, length: int) -> np.ndarray:
        """Gather many cyclic 1D windows at once as a ``(len(starts), length)`` block."""
        if self.array.ndim != 1:
            raise UsageError("read_windows_1d needs a 1D array")
        n = self.array.size
        if not 1 <= length <= n:
            raise UsageError(f"window length {length} outside [1, {n}]")
        idx = (np.asarray(starts, dtype=np.int64)[:, None] + np.arange(length)) % n
        coords = None
        if self.touched is not None:
            coords = [(int(i),) for i in idx.ravel()]
        self._charge(idx.size, coords)
        return self.array.values[idx]

    def read_positions_1d(self, positions: np.ndarray) -> np.ndarray:
        positions = np.asarray(positions, dtype=np.int64)
        if self.array.ndim != 1:
            raise UsageError("read_positions_1d needs a 1D array")
        if positions.size and (positions.min() < 0 or positions.max() >= self.array.size):
            raise UsageError("position out of bounds")
        coords = [(int(i),) for i in positions] if self.touched is not None else None
        self._charge(positions.size, coords)
        return self.array.values[positions]


def ceil_side(beta: float, k: int) -> int:
    """Integer window side covering ``beta * k`` cells."""
    return int(math.ceil(beta * k - 1e-9))


__all__ = [
    "BudgetExceeded",
    "CountedView",
    "CyclicWindow",
    "DistanceValue",
    "FlipSet",
    "NdArray",
    "NoSafeFlip",
    "Pattern",
    "UsageError",
    "apply_flips",
    "as_coord",
    "ceil_side",
    "extract_cyclic_window",
    "get",
]
