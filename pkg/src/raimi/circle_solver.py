"""Constructive rotation search on the circle, with verifiable certificates.

Given a finite cover of the circle and a geometric partition, the solver
picks the heaviest cover part, rotates a guaranteed fraction of it into the
first cell, then repeatedly splits the current cell into k equal
subintervals, finds (by pigeonhole) a subinterval holding enough mass, and
shifts that subinterval exactly onto the next cell.  Choosing the rightmost
qualifying subinterval bounds the mass that later shifts can push out of the
cells already handled, so all r intersection measures stay provably
positive.  Every claim the construction makes is recorded in a certificate
that ``verify`` re-derives from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from .circle_sets import CircleSet
from .correlation import argmax
from .errors import CoverError, InternalInvariantError
from .partition import GeometricPartition, build_partition
from .rational import ZERO, mod1


@dataclass(frozen=True)
class CircleCover:
    """Finite family of circle sets whose union is the whole circle.

    Parts may overlap and individual parts may be empty; only the union
    constraint is enforced.
    """

    sets: tuple[CircleSet, ...]

    def __post_init__(self):
        if len(self.sets) < 2:
            raise ValueError("a cover needs at least two parts")
        union = reduce(lambda a, b: a.union(b), self.sets)
        if union.measure() != 1:
            gap = union.complement()
            raise CoverError(
                f"union has measure {union.measure()} < 1; uncovered gap: {gap.to_json()}",
                gap=gap,
            )

    @property
    def t(self) -> int:
        return len(self.sets)


@dataclass(frozen=True)
class RefineStep:
    """Record of one pigeonhole refinement: masses, threshold, rightmost pick.

    ``subinterval_masses`` may be None on certificates parsed from compact
    JSON; the verifier recomputes the masses either way.
    """

    s: int
    subinterval_masses: tuple[Fraction, ...] | None
    threshold: Fraction
    chosen_j: int  # 1-based subinterval index
    c_j: Fraction  # left endpoint of the chosen subinterval


@dataclass(frozen=True)
class RotationTrace:
    """Full construction record: chosen part, shifts, and refinement steps."""

    m: int  # 1-based index of the chosen cover part
    beta: Fraction  # 1/t, the guaranteed heaviest-part mass
    thetas: tuple[Fraction, ...]  # incremental shifts theta_1..theta_r
    phis: tuple[Fraction, ...]  # accumulated shifts phi_s = theta_1+...+theta_s
    steps: tuple[RefineStep, ...]


@dataclass(frozen=True)
class RaimiCertificate:
    """Self-contained witness that the rotated part meets every cell.

    ``verified`` is true exactly when every recorded measure is at least its
    guaranteed lower bound, all of which are strictly positive.
    """

    partition: GeometricPartition
    m: int
    theta: Fraction
    measures: tuple[Fraction, ...]
    bounds: tuple[Fraction, ...]
    trace: RotationTrace
    verified: bool


def lower_bounds(partition: GeometricPartition) -> tuple[Fraction, ...]:
    """Guaranteed per-cell lower bounds for a certificate on this partition."""
    beta = Fraction(1, partition.t)
    r = partition.r
    out = []
    for s in range(1, r + 1):
        exponent = s + 5 if s < r else r + 2
        out.append(beta / (1 << exponent) * partition.deltas[s - 1])
    return tuple(out)


def select_m(cover: CircleCover) -> tuple[int, Fraction]:
    """Smallest index of maximal measure; its measure is at least 1/t."""
    measures = [part.measure() for part in cover.sets]
    heaviest = max(measures)
    beta = Fraction(1, cover.t)
    if heaviest < beta:
        raise InternalInvariantError(
            f"heaviest part has measure {heaviest} < 1/t = {beta} despite full union"
        )
    return measures.index(heaviest) + 1, beta


def initial_rotation(partition: GeometricPartition, cover_part: CircleSet) -> Fraction:
    """Rotation moving at least measure(E_1)*measure(F) of F into the first cell.

    Uses the exact maximizer of the overlap profile; the maximum is never
    below the mean, which is all the downstream estimates consume.
    """
    theta_1, _ = argmax(partition.parts[0], cover_part)
    return theta_1


def refine_step(
    partition: GeometricPartition,
    cover_part: CircleSet,
    s: int,
    phi_s: Fraction,
) -> tuple[Fraction, RefineStep]:
    """One pigeonhole refinement: split cell s, pick the rightmost heavy piece.

    Splits E_s into k subintervals of length delta_{s+1}, measures the
    rotated part inside each, and among those reaching the step threshold
    picks the rightmost.  The returned shift maps that subinterval exactly
    onto E_{s+1}.
    """
    r, k = partition.r, partition.k
    if not (1 <= s <= r - 1):
        raise ValueError(f"refinement step s={s} outside 1..{r - 1}")
    beta = Fraction(1, partition.t)
    delta_s = partition.deltas[s - 1]
    delta_next = partition.deltas[s]
    u_s = partition.anchors[s - 1]
    u_next = partition.anchors[s]

    shifted = cover_part.translate(phi_s)
    carried = shifted.intersect(partition.parts[s - 1]).measure()
    floor_s = beta / (1 << (s + 2)) * delta_s
    if carried < floor_s:
        raise InternalInvariantError(
            f"cell {s} carries {carried} < required {floor_s} before refinement"
        )

    masses = []
    for i in range(k):
        lo = u_s + i * delta_next
        piece = CircleSet(((lo, lo + delta_next),))
        masses.append(shifted.intersect(piece).measure())

    threshold = beta / (1 << (s + 3)) * delta_next
    chosen_j = 0
    for i in range(k, 0, -1):  # rightmost qualifying subinterval
        if masses[i - 1] >= threshold:
            chosen_j = i
            break
    if chosen_j == 0:
        raise InternalInvariantError(
            f"no subinterval of cell {s} reaches threshold {threshold}"
        )
    c_j = u_s + (chosen_j - 1) * delta_next
    theta_next = u_next - c_j
    step = RefineStep(s, tuple(masses), threshold, chosen_j, c_j)
    return theta_next, step


def solve(r: int, cover: CircleCover, k: int | None = None) -> RaimiCertificate:
    """Run the full construction and return a certificate.

    The construction guarantees ``verified`` is true for every valid input;
    a false result is an implementation failure to be reported, never
    silently accepted.
    """
    partition = build_partition(r, cover.t, k)
    m, beta = select_m(cover)
    part = cover.sets[m - 1]

    thetas = [initial_rotation(partition, part)]
    phis = [thetas[0]]
    steps: list[RefineStep] = []
    for s in range(1, r):
        theta_next, step = refine_step(partition, part, s, phis[-1])
        thetas.append(theta_next)
        phis.append(mod1(phis[-1] + theta_next))
        steps.append(step)
        retained = part.translate(phis[-1]).intersect(partition.parts[s - 1]).measure()
        retention_floor = beta / (1 << (s + 4)) * partition.deltas[s - 1]
        if retained < retention_floor:
            raise InternalInvariantError(
                f"cell {s} retained {retained} < {retention_floor} after step {s}",
                trace=RotationTrace(m, beta, tuple(thetas), tuple(phis), tuple(steps)),
            )

    trace = RotationTrace(m, beta, tuple(thetas), tuple(phis), tuple(steps))

    # each incremental shift is small, and the tail of later shifts cannot
    # evacuate more than the final bound allows
    for s in range(1, r):
        if not (ZERO < thetas[s] <= partition.deltas[s - 1]):
            raise InternalInvariantError(f"shift {s + 1} outside (0, delta_{s}]", trace=trace)
    for s in range(1, r):
        tail = sum(thetas[s + 1 :], ZERO)
        cap = partition.deltas[s - 1] / (partition.k - 1)
        if tail > cap or cap > beta / (1 << (s + 5)) * partition.deltas[s - 1]:
            raise InternalInvariantError(f"tail of shifts after step {s} too large", trace=trace)

    theta = phis[-1]
    final = part.translate(theta)
    measures = tuple(final.intersect(cell).measure() for cell in partition.parts)
    bounds = lower_bounds(partition)
    verified = all(got >= bound > 0 for got, bound in zip(measures, bounds))
    return RaimiCertificate(partition, m, theta, measures, bounds, trace, verified)


def verify(certificate: RaimiCertificate, cover: CircleCover) -> bool:
    """Re-derive every claim of a certificate from the cover alone.

    Rebuilds the partition, replays each refinement step (recomputing all
    subinterval masses), rechecks the shift bookkeeping, and recomputes all
    final measures; nothing stored in the certificate is trusted.  Returns
    False on any mismatch; raises only for structural inconsistencies.
    """
    partition = certificate.partition
    r = partition.r
    if partition.t != cover.t:
        raise ValueError(
            f"certificate built for t={partition.t}, cover has {cover.t} parts"
        )
    trace = certificate.trace
    if len(trace.thetas) != r or len(trace.phis) != r or len(trace.steps) != r - 1:
        raise ValueError("trace lengths inconsistent with r")
    if len(certificate.measures) != r or len(certificate.bounds) != r:
        raise ValueError("measure/bound lengths inconsistent with r")

    if build_partition(r, cover.t, partition.k) != partition:
        return False
    if not (1 <= certificate.m <= cover.t) or trace.m != certificate.m:
        return False
    beta = Fraction(1, cover.t)
    if trace.beta != beta:
        return False

    if trace.phis[0] != trace.thetas[0]:
        return False
    for s in range(1, r):
        if trace.phis[s] != mod1(trace.phis[s - 1] + trace.thetas[s]):
            return False
    if certificate.theta != trace.phis[-1]:
        return False
    if tuple(step.s for step in trace.steps) != tuple(range(1, r)):
        return False

    part = cover.sets[certificate.m - 1]
    for step in trace.steps:
        s = step.s
        delta_next = partition.deltas[s]
        u_s = partition.anchors[s - 1]
        u_next = partition.anchors[s]
        shifted = part.translate(trace.phis[s - 1])
        masses = []
        for i in range(partition.k):
            lo = u_s + i * delta_next
            piece = CircleSet(((lo, lo + delta_next),))
            masses.append(shifted.intersect(piece).measure())
        threshold = beta / (1 << (s + 3)) * delta_next
        if step.threshold != threshold:
            return False
        qualifying = [i + 1 for i, mass in enumerate(masses) if mass >= threshold]
        if not qualifying or step.chosen_j != qualifying[-1]:
            return False
        if step.c_j != u_s + (step.chosen_j - 1) * delta_next:
            return False
        if trace.thetas[s] != u_next - step.c_j:
            return False
        if step.subinterval_masses is not None and tuple(step.subinterval_masses) != tuple(masses):
            return False

    final = part.translate(certificate.theta)
    measures = tuple(final.intersect(cell).measure() for cell in partition.parts)
    if tuple(certificate.measures) != measures:
        return False
    if tuple(certificate.bounds) != lower_bounds(partition):
        return False
    if not all(got >= bound > 0 for got, bound in zip(measures, certificate.bounds)):
        return False
    return certificate.verified is True
