"""Geometrically decreasing partition of [0, 1) with integer ratio k.

The circle splits into r consecutive cells whose lengths shrink by the exact
factor k, with k large enough that the iterated-shift bookkeeping of the
solver can afford all of its losses.  All identities (the lengths summing to
exactly 1, the cells tiling [0, 1)) hold as rational equalities, not limits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from .circle_sets import CircleSet
from .errors import InternalInvariantError
from .rational import ONE, ZERO


@dataclass(frozen=True)
class GeometricPartition:
    """Cells E_1, ..., E_r with |E_i| = deltas[i-1] and left ends anchors[i-1]."""

    r: int
    t: int
    k: int
    ratio_sum: Fraction  # 1 + 1/k + ... + 1/k^(r-1)
    deltas: tuple[Fraction, ...]
    anchors: tuple[Fraction, ...]
    parts: tuple[CircleSet, ...]


def _validate_rt(r: int, t: int) -> None:
    if r < 2:
        raise ValueError(f"need r >= 2 partition cells, got {r}")
    if t < 2:
        raise ValueError(f"need t >= 2 cover parts, got {t}")


def default_k(r: int, t: int) -> int:
    """Smallest ratio strictly beyond the 1 + 2^(r+4) * t threshold.

    The solver's estimates use the threshold strictly, so the default is
    2^(r+4) * t + 2; never rely on the boundary case of a strict inequality.
    """
    _validate_rt(r, t)
    return (1 << (r + 4)) * t + 2


def build_partition(r: int, t: int, k: int | None = None) -> GeometricPartition:
    """Construct the partition; k below default_k(r, t) is rejected."""
    _validate_rt(r, t)
    k_min = default_k(r, t)
    if k is None:
        k = k_min
    elif k < k_min:
        raise ValueError(f"k={k} below the guaranteed threshold {k_min} for r={r}, t={t}")

    ratio_sum = sum((Fraction(1, k**i) for i in range(1, r)), ONE)
    deltas = [1 / ratio_sum]
    for _ in range(r - 1):
        deltas.append(deltas[-1] / k)
    anchors = [ZERO]
    for d in deltas[:-1]:
        anchors.append(anchors[-1] + d)
    uppers = anchors[1:] + [ONE]
    parts = tuple(CircleSet(((lo, hi),)) for lo, hi in zip(anchors, uppers))

    # exactness checks: these are theorems about the construction, so any
    # failure is a bug in the arithmetic above
    if sum(deltas, ZERO) != 1:
        raise InternalInvariantError(f"cell lengths sum to {sum(deltas, ZERO)}, not 1")
    for d, d_next in zip(deltas, deltas[1:]):
        if d_next * k != d:
            raise InternalInvariantError("geometric ratio broken between consecutive cells")
    union = reduce(lambda a, b: a.union(b), parts)
    if union != CircleSet.full():
        raise InternalInvariantError("cells do not tile [0, 1)")
    beta = Fraction(1, t)
    for s in range(1, r):
        if Fraction(1, k) > beta / (1 << (s + 5)):
            raise InternalInvariantError(f"ratio k={k} too small for the step-{s} tail bound")

    return GeometricPartition(r, t, k, ratio_sum, tuple(deltas), tuple(anchors), parts)
