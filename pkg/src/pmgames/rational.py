"""Exact rational helpers: parsing and canonical formatting."""
from __future__ import annotations

from fractions import Fraction
from typing import Union

RationalLike = Union[int, str, Fraction]


def to_rational(value: RationalLike) -> Fraction:
    """Convert ints, "p/q" strings and Fractions to a Fraction.

    Floats are rejected on purpose: every quantity in the package is exact.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(c in text for c in ".eE"):
            raise ValueError(f"not a rational literal: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def fmt(value: RationalLike) -> str:
    """Canonical string: "7" for integers, "7/2" otherwise."""
    q = to_rational(value)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"
