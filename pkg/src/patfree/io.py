"""Text formats for arrays and flip sets.

NDA text format::

    NDA 1
    dims 2
    2 3
    alphabet 2
    0 1 1
    0 0 1

Values are row-major and may be split across lines arbitrarily; for
alphabets of at most 10 symbols a run of digits such as ``011`` counts as
one value per digit. Lines starting with ``#`` are ignored. A file that does
not start with ``NDA`` is read as a raw 1D digit string.
"""

from __future__ import annotations

import json
import os
from typing import Optional, TextIO, Union

import numpy as np

from .core import FlipSet, NdArray, Pattern, UsageError

Source = Union[str, os.PathLike, TextIO]


class ParseError(UsageError):
    """Malformed input; ``line`` is 1-based, ``offset`` is the 0-based column."""

    def __init__(self, message: str, line: int = 0, offset: int = 0):
        super().__init__(f"line {line}, offset {offset}: {message}" if line else message)
        self.line = line
        self.offset = offset


def _read_text(source: Source) -> str:
    if hasattr(source, "read"):
        return source.read()
    with open(source, "r", encoding="utf-8") as fh:
        return fh.read()


def _tokens(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.lstrip().startswith("#"):
            continue
        col = 0
        for part in line.split():
            col = line.index(part, col)
            yield lineno, col, part
            col += len(part)


def _int_token(tok, what: str) -> int:
    lineno, col, text = tok
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"expected integer {what}, got {text!r}", lineno, col) from None


def _expect(it, word: str):
    tok = next(it, None)
    if tok is None:
        raise ParseError(f"missing header keyword {word!r}")
    if tok[2] != word:
        raise ParseError(f"expected {word!r}, got {tok[2]!r}", tok[0], tok[1])
    return tok


def parse_text(text: str, alphabet: Optional[int] = None) -> NdArray:
    stripped = "\n".join(ln for ln in text.splitlines() if not ln.lstrip().startswith("#"))
    if not stripped.split() or stripped.split()[0] != "NDA":
        return _parse_raw(text, alphabet)
    it = iter(_tokens(text))
    _expect(it, "NDA")
    ver = next(it, None)
    if ver is None or ver[2] != "1":
        raise ParseError("unsupported NDA version", *(ver[:2] if ver else (0, 0)))
    _expect(it, "dims")
    dtok = next(it, None)
    if dtok is None:
        raise ParseError("missing dimension count")
    d = _int_token(dtok, "dimension count")
    if d < 1:
        raise ParseError("dimension count must be at least 1", dtok[0], dtok[1])
    sides = []
    for _ in range(d):
        tok = next(it, None)
        if tok is None:
            raise ParseError(f"expected {d} side lengths, got {len(sides)}")
        n = _int_token(tok, "side length")
        if n < 1:
            raise ParseError("side lengths must be at least 1", tok[0], tok[1])
        sides.append(n)
    _expect(it, "alphabet")
    atok = next(it, None)
    if atok is None:
        raise ParseError("missing alphabet size")
    sigma = _int_token(atok, "alphabet size")
    if sigma < 2:
        raise ParseError("alphabet size must be at least 2", atok[0], atok[1])
    values = []
    for lineno, col, text_ in it:
        if sigma <= 10 and len(text_) > 1 and text_.isdigit():
            items = [(col + i, ch) for i, ch in enumerate(text_)]
        else:
            items = [(col, text_)]
        for c, item in items:
            try:
                v = int(item)
            except ValueError:
                raise ParseError(f"bad symbol {item!r}", lineno, c) from None
            if not 0 <= v < sigma:
                raise ParseError(f"symbol {v} out of range for alphabet {sigma}", lineno, c)
            values.append(v)
    expected = int(np.prod(sides))
    if len(values) != expected:
        raise ParseError(f"dims {tuple(sides)} need {expected} values, got {len(values)}")
    return NdArray(np.asarray(values, dtype=np.int64).reshape(sides), sigma)


def _parse_raw(text: str, alphabet: Optional[int]) -> NdArray:
    digits = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.lstrip().startswith("#"):
            continue
        for col, ch in enumerate(line):
            if ch.isspace():
                continue
            if not ch.isdigit():
                raise ParseError(f"bad symbol {ch!r} in raw string", lineno, col)
            v = int(ch)
            if alphabet is not None and v >= alphabet:
                raise ParseError(f"symbol {v} out of range for alphabet {alphabet}", lineno, col)
            digits.append(v)
    if not digits:
        raise ParseError("empty input")
    return NdArray(np.asarray(digits, dtype=np.int64), alphabet)


def parse_array(source: Source, alphabet: Optional[int] = None) -> NdArray:
    """Read an array from a path or text stream, in NDA or raw digit format."""
    return parse_text(_read_text(source), alphabet)


def parse_pattern(source: Source, alphabet: Optional[int] = None) -> Pattern:
    return Pattern.from_array(parse_array(source, alphabet))


def serialize_array(A: NdArray) -> str:
    v = A.values
    lines = ["NDA 1", f"dims {A.ndim}", " ".join(str(n) for n in A.dims), f"alphabet {A.sigma}"]
    rows = v.reshape(-1, v.shape[-1])
    for row in rows:
        lines.append(" ".join(map(str, row.tolist())))
    return "\n".join(lines) + "\n"


def write_array(A: NdArray, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_array(A))


def flipset_to_json(F: FlipSet) -> str:
    return json.dumps({"flips": [{"coord": list(c), "value": v} for c, v in F]})


def flipset_from_json(text: str) -> FlipSet:
    try:
        obj = json.loads(text)
        return FlipSet(tuple((tuple(f["coord"]), int(f["value"])) for f in obj["flips"]))
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ParseError(f"malformed flip set: {exc}") from None


def read_flipset(source: Source) -> FlipSet:
    return flipset_from_json(_read_text(source))


def dumps_record(rec: dict) -> str:
    """One-line JSON with insertion-ordered keys."""
    return json.dumps(rec, default=_jsonable)


def _jsonable(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not serializable: {type(obj).__name__}")

