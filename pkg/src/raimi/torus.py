"""Exact box-set algebra on the n-torus and the slice-and-select reduction.

Sets are finite unions of axis-aligned half-open boxes with rational corners.
The reduction to the circle works coordinate-wise: for each cover part the
measure of its fiber over a first-coordinate point x is piecewise constant in
x, so thresholding those profiles at 1/t (taking the minimal qualifying
index) partitions the circle into selector sets C_1..C_t.  A circle
certificate for that partition lifts to the torus by shifting only the first
coordinate, and the lifted intersection measures dominate 1/t times the
circle measures, which keeps them strictly positive.
"""

from __future__ import annotations

import itertools
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from math import prod

from .circle_sets import CircleSet, _canonical
from .circle_solver import CircleCover, RaimiCertificate, solve, verify
from .errors import CoverError, InternalInvariantError
from .rational import ONE, ZERO, mod1

Box = tuple[tuple[Fraction, Fraction], ...]


def _validate_box(box, dim: int) -> Box:
    if len(box) != dim:
        raise ValueError(f"box {box} has {len(box)} coordinates, expected {dim}")
    out = []
    for lo, hi in box:
        if lo == hi:
            raise ValueError(f"degenerate coordinate [{lo}, {hi}) in box")
        if not (ZERO <= lo < hi <= ONE):
            raise ValueError(f"coordinate range [{lo}, {hi}) not inside [0, 1)")
        out.append((lo, hi))
    return tuple(out)


@dataclass(frozen=True)
class BoxSet:
    """Pairwise disjoint axis-aligned half-open boxes in [0, 1)^dim.

    Normal form is the slab decomposition produced by ``disjointify``:
    refined on the input endpoints, merged along the last coordinate, and
    sorted by lower corner.
    """

    dim: int
    boxes: tuple[Box, ...]

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dim}")
        for box in self.boxes:
            _validate_box(box, self.dim)

    @classmethod
    def empty(cls, dim: int) -> "BoxSet":
        return cls(dim, ())

    @classmethod
    def full(cls, dim: int) -> "BoxSet":
        return cls(dim, (((ZERO, ONE),) * dim,))

    @classmethod
    def from_circle_set(cls, circle_set: CircleSet) -> "BoxSet":
        return cls(1, tuple(((lo, hi),) for lo, hi in circle_set.intervals))

    def to_circle_set(self) -> CircleSet:
        if self.dim != 1:
            raise ValueError(f"only 1-dimensional box sets embed in the circle, got dim={self.dim}")
        return CircleSet(_canonical(box[0] for box in self.boxes))

    def is_empty(self) -> bool:
        return not self.boxes

    def measure(self) -> Fraction:
        return sum((prod(hi - lo for lo, hi in box) for box in self.boxes), ZERO)

    def translate(self, shift) -> "BoxSet":
        """Coordinatewise shift mod 1, splitting boxes that cross 1."""
        shift = tuple(mod1(x) for x in shift)
        if len(shift) != self.dim:
            raise ValueError(f"shift has {len(shift)} coordinates, expected {self.dim}")
        pieces = []
        for box in self.boxes:
            per_coord = []
            for (lo, hi), delta in zip(box, shift):
                lo, hi = lo + delta, hi + delta
                if hi <= ONE:
                    per_coord.append([(lo, hi)])
                elif lo >= ONE:
                    per_coord.append([(lo - 1, hi - 1)])
                else:
                    per_coord.append([(lo, ONE), (ZERO, hi - 1)])
            pieces.extend(itertools.product(*per_coord))
        return disjointify(pieces, self.dim)

    def intersect(self, other: "BoxSet") -> "BoxSet":
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        out = []
        for a in self.boxes:
            for b in other.boxes:
                cell = []
                for (a_lo, a_hi), (b_lo, b_hi) in zip(a, b):
                    lo, hi = max(a_lo, b_lo), min(a_hi, b_hi)
                    if lo >= hi:
                        break
                    cell.append((lo, hi))
                else:
                    out.append(tuple(cell))
        return disjointify(out, self.dim)

    def complement(self) -> "BoxSet":
        cuts = _coordinate_cuts(self.boxes, self.dim)
        cells = []
        for cell in itertools.product(*(_consecutive(axis) for axis in cuts)):
            if not any(_box_covers(box, cell) for box in self.boxes):
                cells.append(cell)
        return BoxSet(self.dim, _merge_last_axis(cells))

    def __repr__(self):
        return f"BoxSet(dim={self.dim}, boxes={len(self.boxes)}, measure={self.measure()})"


def _coordinate_cuts(boxes, dim: int) -> list[list[Fraction]]:
    cuts = [{ZERO, ONE} for _ in range(dim)]
    for box in boxes:
        for axis, (lo, hi) in enumerate(box):
            cuts[axis].add(lo)
            cuts[axis].add(hi)
    return [sorted(axis) for axis in cuts]


def _consecutive(values):
    return list(zip(values, values[1:]))


def _box_covers(box: Box, cell: Box) -> bool:
    return all(b_lo <= c_lo and c_hi <= b_hi for (b_lo, b_hi), (c_lo, c_hi) in zip(box, cell))


def _merge_last_axis(cells) -> tuple[Box, ...]:
    """Merge grid cells that touch along the last coordinate; input lex-sorted."""
    merged: list[Box] = []
    for cell in cells:
        if merged and merged[-1][:-1] == cell[:-1] and merged[-1][-1][1] == cell[-1][0]:
            merged[-1] = merged[-1][:-1] + ((merged[-1][-1][0], cell[-1][1]),)
        else:
            merged.append(cell)
    return tuple(merged)


def disjointify(raw_boxes, dim: int) -> BoxSet:
    """Canonical slab decomposition of a union of (possibly overlapping) boxes.

    Refines along every input endpoint per coordinate, keeps the grid cells
    covered by at least one input box, and merges where possible along the
    last coordinate.  The output measure equals the measure of the set union
    of the inputs.
    """
    boxes = [_validate_box(box, dim) for box in raw_boxes]
    if not boxes:
        return BoxSet(dim, ())
    cuts = _coordinate_cuts(boxes, dim)
    covered = []
    for cell in itertools.product(*(_consecutive(axis) for axis in cuts)):
        if any(_box_covers(box, cell) for box in boxes):
            covered.append(cell)
    return BoxSet(dim, _merge_last_axis(covered))


@dataclass(frozen=True)
class SliceProfile:
    """Piecewise-constant fiber measure x -> measure of {y : (x, y) in S}.

    Constant on each cell between consecutive first-coordinate breakpoints;
    the last cell wraps up to 1.
    """

    breakpoints: tuple[Fraction, ...]  # starts at 0
    cell_values: tuple[Fraction, ...]

    def value_at(self, x: Fraction) -> Fraction:
        x = mod1(x)
        return self.cell_values[bisect_right(self.breakpoints, x) - 1]

    def integral(self) -> Fraction:
        total = ZERO
        for idx, value in enumerate(self.cell_values):
            lo = self.breakpoints[idx]
            hi = self.breakpoints[idx + 1] if idx + 1 < len(self.breakpoints) else ONE
            total += value * (hi - lo)
        return total


def slice_profile(box_set: BoxSet) -> SliceProfile:
    """Fiber-measure profile of a box set over its first coordinate."""
    if box_set.dim < 2:
        raise ValueError("1-dimensional sets take the circle path, not slicing")
    points = {ZERO}
    for box in box_set.boxes:
        lo, hi = box[0]
        points.add(lo)
        if hi != ONE:
            points.add(hi)
    breakpoints = tuple(sorted(points))
    values = []
    for x in breakpoints:
        fibers = [box[1:] for box in box_set.boxes if box[0][0] <= x < box[0][1]]
        values.append(disjointify(fibers, box_set.dim - 1).measure())
    profile = SliceProfile(breakpoints, tuple(values))
    if profile.integral() != box_set.measure():
        raise InternalInvariantError("slice integral disagrees with box measure")
    return profile


def _selector_cells(cover, t: int) -> tuple[tuple[Fraction, ...], tuple[int, ...]]:
    """Common-refinement cells and, per cell, the minimal qualifying index."""
    profiles = [slice_profile(part) for part in cover]
    cuts = sorted(set().union(*(profile.breakpoints for profile in profiles)) | {ZERO})
    threshold = Fraction(1, t)
    assignment = []
    for idx, lo in enumerate(cuts):
        hi = cuts[idx + 1] if idx + 1 < len(cuts) else ONE
        chosen = next(
            (m for m in range(1, t + 1) if profiles[m - 1].value_at(lo) >= threshold),
            None,
        )
        if chosen is None:
            raise CoverError(f"cover violation at x in [{lo}, {hi}): no fiber reaches 1/{t}")
        assignment.append(chosen)
    return tuple(cuts), tuple(assignment)


def _selector_sets(cuts, assignment, t: int) -> tuple[CircleSet, ...]:
    out = []
    for m in range(1, t + 1):
        intervals = []
        for idx, owner in enumerate(assignment):
            if owner != m:
                continue
            lo = cuts[idx]
            hi = cuts[idx + 1] if idx + 1 < len(cuts) else ONE
            intervals.append((lo, hi))
        out.append(CircleSet(_canonical(intervals)))
    return tuple(out)


def selector_partition(cover, t: int) -> tuple[CircleSet, ...]:
    """Partition of the circle by minimal cover index with fiber measure >= 1/t.

    Empty selector sets are retained so indices stay aligned with the cover.
    """
    cover = tuple(cover)
    if t != len(cover):
        raise ValueError(f"t={t} does not match cover size {len(cover)}")
    _require_full_union(cover)
    cuts, assignment = _selector_cells(cover, t)
    return _selector_sets(cuts, assignment, t)


def _require_full_union(cover) -> BoxSet:
    dims = {part.dim for part in cover}
    if len(dims) != 1:
        raise ValueError(f"cover mixes dimensions {sorted(dims)}")
    dim = dims.pop()
    union = disjointify([box for part in cover for box in part.boxes], dim)
    if union.measure() != 1:
        gap = union.complement()
        raise CoverError(
            f"union has measure {union.measure()} < 1; uncovered gap measure {gap.measure()}",
            gap=gap,
        )
    return union


def _first_axis_slab(lo: Fraction, hi: Fraction, dim: int) -> BoxSet:
    return BoxSet(dim, (((lo, hi),) + ((ZERO, ONE),) * (dim - 1),))


@dataclass(frozen=True)
class TorusCertificate:
    """Torus witness: a circle certificate for the selector partition, lifted.

    The shift moves only the first coordinate.  ``transfer_bounds`` are 1/t
    times the circle certificate's intersection measures; ``verified`` means
    every torus measure reaches its transfer bound, all strictly positive.
    """

    dim: int
    circle_certificate: RaimiCertificate
    m_star: int
    theta: tuple[Fraction, ...]
    measures: tuple[Fraction, ...]
    transfer_bounds: tuple[Fraction, ...]
    slice_breakpoints: tuple[Fraction, ...]
    selector: tuple[int, ...]
    verified: bool


def solve_torus(r: int, cover, k: int | None = None) -> TorusCertificate:
    """Slice, select, solve on the circle, then lift the witness to the torus."""
    cover = tuple(cover)
    if len(cover) < 2:
        raise ValueError("a cover needs at least two parts")
    dims = {part.dim for part in cover}
    if len(dims) != 1:
        raise ValueError(f"cover mixes dimensions {sorted(dims)}")
    dim = dims.pop()
    if dim < 2:
        raise ValueError("1-dimensional covers take the circle solver")
    t = len(cover)
    _require_full_union(cover)

    cuts, assignment = _selector_cells(cover, t)
    circle_cover = CircleCover(_selector_sets(cuts, assignment, t))
    circle_certificate = solve(r, circle_cover, k)

    m_star = circle_certificate.m
    theta = (circle_certificate.theta,) + (ZERO,) * (dim - 1)
    shifted = cover[m_star - 1].translate(theta)
    partition = circle_certificate.partition
    measures = []
    for cell in partition.parts:
        lo, hi = cell.intervals[0]
        measures.append(shifted.intersect(_first_axis_slab(lo, hi, dim)).measure())
    measures = tuple(measures)
    transfer_bounds = tuple(value / t for value in circle_certificate.measures)
    verified = all(got >= bound > 0 for got, bound in zip(measures, transfer_bounds))
    return TorusCertificate(
        dim,
        circle_certificate,
        m_star,
        theta,
        measures,
        transfer_bounds,
        cuts,
        assignment,
        verified,
    )


def verify_torus(certificate: TorusCertificate, cover) -> bool:
    """Re-derive a torus certificate from the cover alone.

    Recomputes the selector partition, verifies the embedded circle
    certificate against it, and recomputes all lifted measures and transfer
    bounds.  Returns False on any mismatch; raises only for structural
    inconsistencies.
    """
    cover = tuple(cover)
    dims = {part.dim for part in cover}
    if len(dims) != 1 or dims.pop() != certificate.dim:
        raise ValueError("cover dimensions inconsistent with certificate")
    t = len(cover)
    if certificate.circle_certificate.partition.t != t:
        raise ValueError(f"certificate built for t={certificate.circle_certificate.partition.t}, cover has {t}")
    if len(certificate.theta) != certificate.dim:
        raise ValueError("shift vector length inconsistent with dimension")
    _require_full_union(cover)

    cuts, assignment = _selector_cells(cover, t)
    if cuts != certificate.slice_breakpoints or assignment != certificate.selector:
        return False
    circle_cover = CircleCover(_selector_sets(cuts, assignment, t))
    if not verify(certificate.circle_certificate, circle_cover):
        return False
    if certificate.m_star != certificate.circle_certificate.m:
        return False
    expected_theta = (certificate.circle_certificate.theta,) + (ZERO,) * (certificate.dim - 1)
    if certificate.theta != expected_theta:
        return False

    shifted = cover[certificate.m_star - 1].translate(certificate.theta)
    partition = certificate.circle_certificate.partition
    measures = []
    for cell in partition.parts:
        lo, hi = cell.intervals[0]
        measures.append(shifted.intersect(_first_axis_slab(lo, hi, certificate.dim)).measure())
    if tuple(measures) != certificate.measures:
        return False
    transfer_bounds = tuple(value / t for value in certificate.circle_certificate.measures)
    if transfer_bounds != certificate.transfer_bounds:
        return False
    if not all(got >= bound > 0 for got, bound in zip(measures, transfer_bounds)):
        return False
    return certificate.verified is True
