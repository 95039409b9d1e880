"""JSON-ready renderings of service results; rationals print as exact text."""

from __future__ import annotations

from typing import Any, Dict, List, Optional

from qfactorial.forms import format_form
from qfactorial.formats.schemas import (
    CurvePayload,
    LedgerRowPayload,
    WitnessCertificatePayload,
    point_list,
    rational_text,
)
from qfactorial.services.conditions import BaseLocusCriterion, DefectReport, NonVanishingCheck, ProbeResult, Verdict
from qfactorial.services.families import NodeList
from qfactorial.services.incidence import BeseLedger, CurveMax, NablaCheck, PartitionCertificate
from qfactorial.services.pipeline import FullReport, WitnessCertificate


def scalar_list(values: Any) -> List[Optional[str]]:
    return [rational_text(v) for v in values]


def defect_payload(report: DefectReport) -> Dict[str, Any]:
    payload: Dict[str, Any] = {
        "degree": report.degree,
        "num_points": report.num_points,
        "rank": report.rank,
        "defect": report.defect,
        "independent": report.independent,
    }
    if report.independent:
        payload["separators"] = [format_form(form) for form in report.separators]
    else:
        payload["dependency"] = scalar_list(report.dependency or ())
    return payload


def verdict_payload(verdict: Verdict) -> Dict[str, Any]:
    return {
        "mode": verdict.mode.label,
        "num_nodes": verdict.num_nodes,
        "bound": rational_text(verdict.bound),
        "effective_bound": rational_text(verdict.effective_bound),
        "bound_ok": verdict.bound_ok,
        "degree": verdict.degree,
        "rank": verdict.report.rank,
        "defect": verdict.defect,
        "q_factorial": verdict.q_factorial,
    }


def curve_payload(curve: CurveMax) -> Dict[str, Any]:
    return CurvePayload(
        degree=curve.degree, count=curve.count, incident=list(curve.incident), witness=format_form(curve.witness)
    ).model_dump()


def nabla_payload(check: NablaCheck) -> Dict[str, Any]:
    return {
        "multiplier": check.multiplier,
        "k_max": check.k_max,
        "passed": check.passed,
        "smallest_failing": check.smallest_failing,
        "rows": [
            {
                "degree": row.degree,
                "allowed": row.allowed,
                "max_on_curve": row.max_on_curve,
                "passed": row.passed,
            }
            for row in check.rows
        ],
    }


def ledger_payload(rows: Any) -> List[Dict[str, Any]]:
    return [
        LedgerRowPayload(
            name=row.name,
            lhs=rational_text(row.lhs),
            relation=row.relation,
            rhs=rational_text(row.rhs) or "0",
            passed=row.passed,
        ).model_dump()
        for row in rows
    ]


def bese_payload(ledger: BeseLedger) -> Dict[str, Any]:
    return {
        "degree": ledger.degree,
        "size": ledger.size,
        "theorem_status": ledger.theorem_status,
        "corollary_status": ledger.corollary_status,
        "theorem_rows": ledger_payload(ledger.theorem_rows),
        "corollary_rows": ledger_payload(ledger.corollary_rows),
    }


def partition_payload(certificate: PartitionCertificate) -> Dict[str, Any]:
    return {
        "mode": certificate.mode.label,
        "points": [point_list(p) for p in certificate.points],
        "parts": [
            {"degree": part.degree, "indices": list(part.indices), "curve": format_form(part.curve)}
            for part in certificate.parts
        ],
        "counts": {str(degree): count for degree, count in sorted(certificate.counts.items())},
        "residual": list(certificate.residual),
        "residual_degree": certificate.residual_degree,
        "residual_check": nabla_payload(certificate.residual_check),
        "ledger": ledger_payload(certificate.ledger),
        "ledger_status": certificate.ledger_status,
    }


def witness_payload(certificate: Optional[WitnessCertificate]) -> Dict[str, Any]:
    if certificate is None:
        return {"status": "no_separator"}
    payload: Dict[str, Any] = {"status": "separator"}
    payload["certificate"] = WitnessCertificatePayload.from_certificate(certificate).model_dump()
    if certificate.partition is not None:
        payload["partition"] = partition_payload(certificate.partition)
    return payload


def probe_payload(probe: ProbeResult) -> Dict[str, Any]:
    return {
        "label": probe.label,
        "primes": list(probe.primes),
        "counts": list(probe.counts),
        "estimate": "empty" if probe.empty else probe.estimate,
    }


def non_vanishing_payload(check: NonVanishingCheck) -> Dict[str, Any]:
    return {
        "k": check.k,
        "linear_system_size": check.linear_system_size,
        "probe": probe_payload(check.probe),
        "predicted_independent": check.predicted_independent,
        "predicted_degree": check.predicted_degree,
        "defect": check.report.defect,
        "agrees": check.agrees,
    }


def criterion_payload(criterion: BaseLocusCriterion) -> Dict[str, Any]:
    return {
        "mode": criterion.mode.label,
        "k": criterion.k,
        "label": criterion.label,
        "linear_system_size": criterion.linear_system_size,
        "probe": probe_payload(criterion.probe),
        "elementary_bound": criterion.elementary_bound,
        "within_elementary_bound": criterion.within_elementary_bound,
        "q_factorial": criterion.q_factorial,
    }


def nodes_payload(nodes: NodeList) -> Dict[str, Any]:
    return {
        "prime": nodes.prime,
        "caveat": nodes.caveat,
        "counts": nodes.counts(),
        "points": [
            {"point": point_list(point), "class": cls.kind, "hessian_rank": cls.hessian_rank}
            for point, cls in zip(nodes.points, nodes.classes)
        ],
    }


def full_report_payload(report: FullReport) -> Dict[str, Any]:
    return {
        "mode": report.mode.label,
        "verdict": verdict_payload(report.verdict),
        "projection_center": (
            [point_list(c) for c in report.projection.center] if report.projection is not None else None
        ),
        "projection_injective": report.projection_injective,
        "profile": [
            {"degree": degree, "max_on_curve": curve.count if curve else None} for degree, curve in report.profile
        ],
        "partition": partition_payload(report.partition) if report.partition is not None else None,
        "partition_error": report.partition_error,
        "points": [
            {
                "point": point_list(status.point),
                "separator": status.has_separator,
                "dependent_on_earlier": status.dependent_on_earlier,
            }
            for status in report.statuses
        ],
        "defect": report.defect,
        "dependent_count": report.dependent_count,
        "no_separator_count": report.no_separator_count,
        "q_factorial": report.q_factorial,
    }
