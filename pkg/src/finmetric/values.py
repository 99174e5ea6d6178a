"""Exact extended nonnegative values.

Finite distances are plain :class:`fractions.Fraction` objects.  The single
extra value ``INF`` is an absorbing, maximal element that interoperates with
``Fraction`` and ``int`` through the reflected comparison/addition protocol,
so ``max``, ``min``, ``sum`` and sorting work on mixed collections.
"""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering
from typing import Union


@total_ordering
class Infinity:
    """The value ``∞``: larger than every rational, absorbing under ``+``."""

    _instance: "Infinity | None" = None

    def __new__(cls) -> "Infinity":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __reduce__(self):
        return (Infinity, ())

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"

    def __hash__(self) -> int:
        return hash("finmetric.INF")

    def __eq__(self, other: object) -> bool:
        return other is self

    def __lt__(self, other: object) -> bool:
        if other is self or isinstance(other, (int, Fraction)):
            return False
        return NotImplemented

    def __gt__(self, other: object) -> bool:
        if other is self:
            return False
        if isinstance(other, (int, Fraction)):
            return True
        return NotImplemented

    def __add__(self, other: object) -> "Infinity":
        if other is self or isinstance(other, (int, Fraction)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, other: object) -> "Infinity":
        # only scaling by a positive rational is meaningful here
        if isinstance(other, (int, Fraction)) and other > 0:
            return self
        return NotImplemented

    __rmul__ = __mul__


INF = Infinity()

ExtValue = Union[Fraction, Infinity]

ZERO = Fraction(0)


class BadValue(ValueError):
    """Raised for malformed or negative value literals."""


def is_finite(v: ExtValue) -> bool:
    return v is not INF


def to_value(raw: object) -> ExtValue:
    """Coerce ``raw`` (str, int, Fraction, INF) into an :data:`ExtValue`.

    Strings accept ``"3/4"``, ``"2"`` and ``"inf"``.  Floats are refused so no
    binary rounding can leak in.
    """
    if raw is INF:
        return INF
    if isinstance(raw, bool):
        raise BadValue(f"not a value: {raw!r}")
    if isinstance(raw, Fraction):
        v = raw
    elif isinstance(raw, int):
        v = Fraction(raw)
    elif isinstance(raw, str):
        s = raw.strip()
        if s in ("inf", "∞"):
            return INF
        if not s or any(c not in "0123456789/-+" for c in s) or s.count("/") > 1:
            raise BadValue(f"bad rational literal {raw!r}")
        num, _, den = s.partition("/")
        if den == "" and "/" in s:
            raise BadValue(f"bad rational literal {raw!r}")
        try:
            n = int(num)
            d = int(den) if den else 1
        except ValueError as exc:
            raise BadValue(f"bad rational literal {raw!r}") from exc
        if d == 0:
            raise BadValue(f"zero denominator in {raw!r}")
        v = Fraction(n, d)
    else:
        raise BadValue(f"not a value: {raw!r}")
    if v < 0:
        raise BadValue(f"negative value {raw!r}")
    return v


def format_value(v: ExtValue) -> str:
    if v is INF:
        return "inf"
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def abs_diff(a: ExtValue, b: ExtValue) -> ExtValue:
    """``|a - b|`` with ``|∞ - ∞| = 0`` and ``|∞ - finite| = ∞``."""
    if a is INF or b is INF:
        return ZERO if a is b else INF
    return abs(a - b)
