"""Exact analysis of the rotation-overlap function of two circle sets.

For interval unions E and F the map theta -> measure(rotate(F, theta) & E)
is piecewise linear, with slope changes exactly where an endpoint of the
rotated F crosses an endpoint of E.  Tabulating the function at those
breakpoints therefore determines it everywhere, which turns statements like
"the average over all rotations equals measure(E) * measure(F)" into exact
rational identities instead of analytic limits.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

from .circle_sets import CircleSet
from .errors import InternalInvariantError
from .rational import ZERO, mod1


def correlation_value(fixed: CircleSet, moving: CircleSet, theta: Fraction) -> Fraction:
    """Measure of rotate(moving, theta) intersected with fixed."""
    return moving.translate(theta).intersect(fixed).measure()


@dataclass(frozen=True)
class CorrelationProfile:
    """Breakpoint table of theta -> measure(rotate(F, theta) & E).

    The function is affine between consecutive breakpoints (cyclically), so
    the table is a complete, exact description.
    """

    fixed: CircleSet
    moving: CircleSet
    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]

    def arcs(self):
        """Yield (lo, hi, v_lo, v_hi) for each cyclic breakpoint arc; hi may be lo_0 + 1."""
        pts, vals = self.breakpoints, self.values
        count = len(pts)
        for idx in range(count):
            nxt = (idx + 1) % count
            hi = pts[nxt] if nxt else pts[0] + 1
            yield pts[idx], hi, vals[idx], vals[nxt]

    def value_at(self, theta: Fraction) -> Fraction:
        """Evaluate anywhere by exact linear interpolation on the arc table."""
        theta = mod1(theta)
        pts = self.breakpoints
        idx = bisect_right(pts, theta) - 1
        if idx < 0:
            # below the first breakpoint: on the arc wrapping through 1
            idx = len(pts) - 1
            theta += 1
        lo = pts[idx]
        if idx == len(pts) - 1:
            hi = pts[0] + 1
            v_lo, v_hi = self.values[idx], self.values[0]
        else:
            hi = pts[idx + 1]
            v_lo, v_hi = self.values[idx], self.values[idx + 1]
        if theta == lo:
            return v_lo
        return v_lo + (v_hi - v_lo) * (theta - lo) / (hi - lo)


def build_profile(fixed: CircleSet, moving: CircleSet) -> CorrelationProfile:
    """Tabulate the overlap function at every endpoint-difference breakpoint."""
    if fixed.is_empty() or moving.is_empty():
        raise ValueError("profile requires non-empty sets")
    breakpoints = tuple(
        sorted({mod1(e - f) for e in fixed.endpoints() for f in moving.endpoints()})
    )
    values = tuple(correlation_value(fixed, moving, b) for b in breakpoints)
    cap = min(fixed.measure(), moving.measure())
    for v in values:
        if not (ZERO <= v <= cap):
            raise InternalInvariantError(f"profile value {v} outside [0, {cap}]")
    return CorrelationProfile(fixed, moving, breakpoints, values)


def integral(fixed: CircleSet, moving: CircleSet) -> Fraction:
    """Exact integral of the overlap function over all rotations.

    The cyclic trapezoid sum is exact for a piecewise-linear function, and
    must equal measure(E) * measure(F); any difference is an internal bug.
    """
    expected = fixed.measure() * moving.measure()
    if fixed.is_empty() or moving.is_empty():
        return expected
    profile = build_profile(fixed, moving)
    total = ZERO
    for lo, hi, v_lo, v_hi in profile.arcs():
        total += (v_lo + v_hi) * (hi - lo) / 2
    if total != expected:
        raise InternalInvariantError(
            f"trapezoid integral {total} != product of measures {expected}"
        )
    return total


def argmax(fixed: CircleSet, moving: CircleSet) -> tuple[Fraction, Fraction]:
    """Global maximum of the overlap function.

    Returns the smallest breakpoint attaining the maximum together with the
    maximal value.  A piecewise-linear function peaks at a breakpoint, so the
    scan is a complete global search; the max is never below the mean, hence
    never below measure(E) * measure(F).
    """
    profile = build_profile(fixed, moving)
    best = max(profile.values)
    theta_star = profile.breakpoints[profile.values.index(best)]
    if best < fixed.measure() * moving.measure():
        raise InternalInvariantError("breakpoint maximum fell below the mean value")
    return theta_star, best


def strict_intermediate(fixed: CircleSet, moving: CircleSet) -> Fraction:
    """A rotation whose overlap is strictly between 0 and measure(F).

    Requires 0 < measure(E) < 1 and measure(F) > 0.  Breakpoints are scanned
    first, then arc midpoints; all candidates have exact rational
    coordinates.  A qualifying candidate always exists: if every breakpoint
    value sat at 0 or measure(F), some arc would have to cross between the
    two levels, and its midpoint lands strictly inside.
    """
    mu_fixed = fixed.measure()
    mu_moving = moving.measure()
    if not (ZERO < mu_fixed < 1):
        raise ValueError(f"fixed set must have measure strictly inside (0, 1), got {mu_fixed}")
    if mu_moving == 0:
        raise ValueError("moving set must be non-empty")
    profile = build_profile(fixed, moving)
    for theta, value in zip(profile.breakpoints, profile.values):
        if ZERO < value < mu_moving:
            return theta
    for lo, hi, _, _ in profile.arcs():
        theta = mod1((lo + hi) / 2)
        if ZERO < profile.value_at(theta) < mu_moving:
            return theta
    raise InternalInvariantError("no strict intermediate rotation among candidates")
