"""Canonical JSON and CSV encodings for covers, certificates and reports.

All rationals serialize as "p/q" strings ("p" for integers).  Emission is
byte-deterministic: sorted keys, two-space indent, LF line endings, one
trailing newline.  Certificates are therefore diffable and hashable.

Cover schema::

    {"dim": n, "cover": [{"name": str, "boxes": [[[lo, hi], ... n pairs], ...]}, ...]}

For dim = 1 each box holds a single [a, b] pair read as the arc from a
forward to b mod 1 (a > b wraps).  For dim >= 2 every pair must satisfy
lo < hi; wrapping boxes are pre-split by the author.
"""

from __future__ import annotations

import hashlib
import json

from .circle_sets import normalize
from .circle_solver import (
    CircleCover,
    RaimiCertificate,
    RefineStep,
    RotationTrace,
)
from .correlation import CorrelationProfile
from .partition import GeometricPartition, build_partition
from .rational import format_rational as _fmt
from .rational import parse_rational as _rat
from .torus import TorusCertificate, _require_full_union, disjointify


def canonical_dumps(document) -> str:
    """Deterministic JSON text: sorted keys, indent 2, trailing newline."""
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="ascii", newline="") as handle:
        handle.write(text)


# ---------------------------------------------------------------------------
# covers


def cover_to_json(cover) -> dict:
    if isinstance(cover, CircleCover):
        entries = []
        for idx, part in enumerate(cover.sets, start=1):
            boxes = [[[_fmt(lo), _fmt(hi)]] for lo, hi in part.intervals]
            entries.append({"name": f"F{idx}", "boxes": boxes})
        return {"dim": 1, "cover": entries}
    parts = tuple(cover)
    entries = []
    for idx, part in enumerate(parts, start=1):
        boxes = [[[_fmt(lo), _fmt(hi)] for lo, hi in box] for box in part.boxes]
        entries.append({"name": f"F{idx}", "boxes": boxes})
    return {"dim": parts[0].dim, "cover": entries}


def cover_from_json(document):
    """Validate and normalize a cover document.

    Returns a CircleCover for dim 1 and a tuple of BoxSets otherwise; the
    covering invariant (union measure exactly 1) is enforced either way.
    """
    if not isinstance(document, dict):
        raise ValueError("cover document must be a JSON object")
    try:
        dim = int(document["dim"])
        entries = document["cover"]
    except (KeyError, TypeError) as exc:
        raise ValueError("cover document needs 'dim' and 'cover' fields") from exc
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    if not isinstance(entries, list) or len(entries) < 2:
        raise ValueError("a cover needs at least two parts")

    if dim == 1:
        sets = []
        for entry in entries:
            arcs = []
            for box in entry["boxes"]:
                if len(box) != 1:
                    raise ValueError("dim-1 boxes must hold exactly one pair")
                (a, b), = box
                arcs.append((_rat(a), _rat(b)))
            sets.append(normalize(arcs))
        return CircleCover(tuple(sets))

    from .torus import _require_full_union, disjointify  # local: avoids cycle at import

    parts = []
    for entry in entries:
        boxes = []
        for box in entry["boxes"]:
            if len(box) != dim:
                raise ValueError(f"box {box} has {len(box)} pairs, expected {dim}")
            boxes.append(tuple((_rat(lo), _rat(hi)) for lo, hi in box))
        parts.append(disjointify(boxes, dim))
    parts = tuple(parts)
    _require_full_union(parts)
    return parts


def parse_cover(text: str):
    """Parse a cover from JSON text (the CLI ingestion path)."""
    return cover_from_json(json.loads(text))


def instance_digest(cover) -> str:
    """Stable identity of an instance: sha256 of its canonical cover JSON."""
    payload = canonical_dumps(cover_to_json(cover)).encode("ascii")
    return hashlib.sha256(payload).hexdigest()


# ---------------------------------------------------------------------------
# partitions


def partition_to_json(partition: GeometricPartition) -> dict:
    return {
        "r": partition.r,
        "t": partition.t,
        "k": partition.k,
        "deltas": [_fmt(d) for d in partition.deltas],
        "anchors": [_fmt(u) for u in partition.anchors],
        "parts": [cell.to_json() for cell in partition.parts],
    }


# ---------------------------------------------------------------------------
# certificates


def _step_to_json(step: RefineStep, include_trace: bool) -> dict:
    doc = {
        "s": step.s,
        "threshold": _fmt(step.threshold),
        "chosen_j": step.chosen_j,
        "c_j": _fmt(step.c_j),
    }
    if include_trace and step.subinterval_masses is not None:
        doc["subinterval_masses"] = [_fmt(m) for m in step.subinterval_masses]
    return doc


def _step_from_json(doc) -> RefineStep:
    masses = doc.get("subinterval_masses")
    return RefineStep(
        s=int(doc["s"]),
        subinterval_masses=None if masses is None else tuple(_rat(m) for m in masses),
        threshold=_rat(doc["threshold"]),
        chosen_j=int(doc["chosen_j"]),
        c_j=_rat(doc["c_j"]),
    )


def certificate_to_json(certificate, include_trace: bool = False) -> dict:
    if isinstance(certificate, TorusCertificate):
        return {
            "dim": certificate.dim,
            "r": certificate.circle_certificate.partition.r,
            "t": certificate.circle_certificate.partition.t,
            "m_star": certificate.m_star,
            "theta": [_fmt(x) for x in certificate.theta],
            "slice_breakpoints": [_fmt(x) for x in certificate.slice_breakpoints],
            "selector": list(certificate.selector),
            "measures": [_fmt(x) for x in certificate.measures],
            "transfer_bounds": [_fmt(x) for x in certificate.transfer_bounds],
            "verified": certificate.verified,
            "circle_certificate": certificate_to_json(
                certificate.circle_certificate, include_trace
            ),
        }
    cert: RaimiCertificate = certificate
    return {
        "r": cert.partition.r,
        "t": cert.partition.t,
        "k": cert.partition.k,
        "m": cert.m,
        "beta": _fmt(cert.trace.beta),
        "theta": _fmt(cert.theta),
        "thetas": [_fmt(x) for x in cert.trace.thetas],
        "phis": [_fmt(x) for x in cert.trace.phis],
        "steps": [_step_to_json(step, include_trace) for step in cert.trace.steps],
        "measures": [_fmt(x) for x in cert.measures],
        "bounds": [_fmt(x) for x in cert.bounds],
        "verified": bool(cert.verified),
    }


def certificate_from_json(document):
    """Rebuild a certificate object; the partition is rederived from (r, t, k)."""
    if not isinstance(document, dict):
        raise ValueError("certificate document must be a JSON object")
    if "m_star" in document:
        circle = certificate_from_json(document["circle_certificate"])
        return TorusCertificate(
            dim=int(document["dim"]),
            circle_certificate=circle,
            m_star=int(document["m_star"]),
            theta=tuple(_rat(x) for x in document["theta"]),
            measures=tuple(_rat(x) for x in document["measures"]),
            transfer_bounds=tuple(_rat(x) for x in document["transfer_bounds"]),
            slice_breakpoints=tuple(_rat(x) for x in document["slice_breakpoints"]),
            selector=tuple(int(x) for x in document["selector"]),
            verified=bool(document["verified"]),
        )
    partition = build_partition(int(document["r"]), int(document["t"]), int(document["k"]))
    trace = RotationTrace(
        m=int(document["m"]),
        beta=_rat(document["beta"]),
        thetas=tuple(_rat(x) for x in document["thetas"]),
        phis=tuple(_rat(x) for x in document["phis"]),
        steps=tuple(_step_from_json(step) for step in document["steps"]),
    )
    return RaimiCertificate(
        partition=partition,
        m=int(document["m"]),
        theta=_rat(document["theta"]),
        measures=tuple(_rat(x) for x in document["measures"]),
        bounds=tuple(_rat(x) for x in document["bounds"]),
        trace=trace,
        verified=bool(document["verified"]),
    )


# ---------------------------------------------------------------------------
# profiles and reports


def profile_to_csv(profile: CorrelationProfile) -> str:
    rows = [f"{_fmt(b)},{_fmt(v)}\n" for b, v in zip(profile.breakpoints, profile.values)]
    return "theta,f\n" + "".join(rows)


def _opt(x) -> str | None:
    return None if x is None else _fmt(x)


def report_to_json(report) -> dict:
    return {
        "instance_digest": report.instance_digest,
        "best_m": report.best_m,
        "best_theta": _opt(report.best_theta),
        "best_min_measure": _opt(report.best_min_measure),
        "solver_theta": _opt(report.solver_theta),
        "solver_min_measure": _opt(report.solver_min_measure),
        "agreement": report.agreement,
        "skipped": report.skipped,
    }
