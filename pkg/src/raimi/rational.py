"""Exact rational scalars: parsing, formatting, circle reduction.

Every measure, endpoint and rotation angle in this package is a
``fractions.Fraction``; nothing anywhere is represented in floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def mod1(x: Fraction) -> Fraction:
    """Reduce ``x`` to the fundamental domain [0, 1) of the circle."""
    return x % 1


def parse_rational(text: str) -> Fraction:
    """Parse a rational written as ``"p/q"`` (or ``"p"`` for integers)."""
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed rational {text!r}") from exc


def format_rational(x: Fraction) -> str:
    """Canonical string form: ``"p/q"``, or ``"p"`` when x is an integer."""
    return str(x)


def denominator_lcm(values: Iterable[Fraction]) -> int:
    """Least common multiple of the denominators of ``values`` (at least 1)."""
    return lcm(1, *(v.denominator for v in values))
