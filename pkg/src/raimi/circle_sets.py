"""Exact set algebra on the circle R/Z.

A set is a finite union of half-open rational intervals [lo, hi) inside the
fundamental domain [0, 1).  The normal form (sorted, pairwise disjoint,
non-touching) is unique, so structural equality is set equality.  All
operations are pure functions over immutable values.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .rational import ONE, ZERO, format_rational, mod1, parse_rational

Interval = tuple[Fraction, Fraction]


def _canonical(intervals: Iterable[Interval]) -> tuple[Interval, ...]:
    """Sort intervals and merge any that overlap or touch."""
    merged: list[list[Fraction]] = []
    for lo, hi in sorted(intervals):
        if merged and lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    return tuple((lo, hi) for lo, hi in merged)


@dataclass(frozen=True)
class CircleSet:
    """Finite union of half-open intervals [lo, hi) in normal form."""

    intervals: tuple[Interval, ...]

    def __post_init__(self):
        prev_hi = None
        for lo, hi in self.intervals:
            if not (ZERO <= lo < hi <= ONE):
                raise ValueError(f"interval [{lo}, {hi}) not inside [0, 1)")
            if prev_hi is not None and lo <= prev_hi:
                raise ValueError("intervals must be sorted and non-touching")
            prev_hi = hi

    @classmethod
    def empty(cls) -> "CircleSet":
        return cls(())

    @classmethod
    def full(cls) -> "CircleSet":
        return cls(((ZERO, ONE),))

    @classmethod
    def from_intervals(cls, pairs: Iterable[Interval]) -> "CircleSet":
        """Build from non-wrapping [lo, hi) pairs, merging where needed."""
        pairs = list(pairs)
        for lo, hi in pairs:
            if not (ZERO <= lo < hi <= ONE):
                raise ValueError(f"interval [{lo}, {hi}) not inside [0, 1)")
        return cls(_canonical(pairs))

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def is_empty(self) -> bool:
        return not self.intervals

    def interval_count(self) -> int:
        return len(self.intervals)

    def measure(self) -> Fraction:
        """Total length; the Haar measure of the set."""
        return sum((hi - lo for lo, hi in self.intervals), ZERO)

    def contains(self, x: Fraction) -> bool:
        x = mod1(x)
        idx = bisect_right(self.intervals, (x, ONE + 1)) - 1
        return idx >= 0 and self.intervals[idx][0] <= x < self.intervals[idx][1]

    def translate(self, theta: Fraction) -> "CircleSet":
        """Image under the rotation x -> x + theta (mod 1)."""
        theta = mod1(theta)
        if theta == 0:
            return self
        pieces: list[Interval] = []
        for lo, hi in self.intervals:
            lo, hi = lo + theta, hi + theta
            if hi <= ONE:
                pieces.append((lo, hi))
            elif lo >= ONE:
                pieces.append((lo - 1, hi - 1))
            else:
                pieces.append((lo, ONE))
                pieces.append((ZERO, hi - 1))
        return CircleSet(_canonical(pieces))

    def intersect(self, other: "CircleSet") -> "CircleSet":
        a, b = self.intervals, other.intervals
        out: list[Interval] = []
        i = j = 0
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo < hi:
                out.append((lo, hi))
            if a[i][1] <= b[j][1]:
                i += 1
            else:
                j += 1
        return CircleSet(tuple(out))

    def union(self, other: "CircleSet") -> "CircleSet":
        return CircleSet(_canonical(self.intervals + other.intervals))

    def complement(self) -> "CircleSet":
        out: list[Interval] = []
        cursor = ZERO
        for lo, hi in self.intervals:
            if cursor < lo:
                out.append((cursor, lo))
            cursor = hi
        if cursor < ONE:
            out.append((cursor, ONE))
        return CircleSet(tuple(out))

    def endpoints(self) -> tuple[Fraction, ...]:
        """Distinct endpoint positions on the circle (1 folds onto 0)."""
        pts = {mod1(x) for iv in self.intervals for x in iv}
        return tuple(sorted(pts))

    def to_json(self) -> list[list[str]]:
        return [[format_rational(lo), format_rational(hi)] for lo, hi in self.intervals]

    @classmethod
    def from_json(cls, items) -> "CircleSet":
        pairs = [(parse_rational(lo), parse_rational(hi)) for lo, hi in items]
        return cls.from_intervals(pairs)

    def __repr__(self):
        body = " ".join(f"[{lo},{hi})" for lo, hi in self.intervals)
        return f"CircleSet({body or 'empty'})"


def normalize(arcs: Iterable[tuple[Fraction, Fraction]]) -> CircleSet:
    """Normalize raw arcs (a, b), read forward from a to b mod 1.

    Endpoints are reduced mod 1, with the upper endpoint landing in (0, 1]
    so that (0, 1) denotes the full circle.  A pair whose endpoints coincide
    after reduction is rejected: it could mean either nothing or everything.
    A pair with a > b wraps past 1 and is split there; this is the only
    place wraparound is interpreted.
    """
    pieces: list[Interval] = []
    for a, b in arcs:
        lo = mod1(a)
        hi = mod1(b)
        if hi == 0:
            hi = ONE
        if lo == hi:
            raise ValueError(f"degenerate arc ({a}, {b}): empty or full is ambiguous")
        if lo < hi:
            pieces.append((lo, hi))
        else:
            pieces.append((lo, ONE))
            pieces.append((ZERO, hi))
    return CircleSet(_canonical(pieces))
