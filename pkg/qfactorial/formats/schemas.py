from __future__ import annotations

from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, model_validator

from qfactorial.core.errors import CertificateError
from qfactorial.exactalg import RATIONALS, Field
from qfactorial.forms import evaluate, format_form, parse_form
from qfactorial.projgeom import ProjPoint


def rational_text(value: Union[int, Fraction, None]) -> Optional[str]:
    """Exact text for a rational: ``"7"`` or ``"28/3"``."""
    if value is None:
        return None
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def point_list(point: ProjPoint) -> List[int]:
    return list(point.coords)


class PrimeField(BaseModel):
    prime: int


class PointSetFile(BaseModel):
    """Structured point file: ambient dimension, field, points and optional labels."""

    ambient_dim: int
    field: Union[Literal["rational"], PrimeField] = "rational"
    points: List[List[int]]
    labels: Optional[List[str]] = None

    @model_validator(mode="after")
    def _check_shape(self) -> "PointSetFile":
        if self.ambient_dim < 1:
            raise ValueError("ambient_dim must be positive")
        for row in self.points:
            if len(row) != self.ambient_dim + 1:
                raise ValueError(f"point {row} does not have {self.ambient_dim + 1} coordinates")
            if not any(row):
                raise ValueError("the zero vector is not a projective point")
        if self.labels is not None and len(self.labels) != len(self.points):
            raise ValueError("labels and points differ in length")
        return self

    def field_descriptor(self) -> Field:
        if isinstance(self.field, PrimeField):
            return Field.prime(self.field.prime)
        return RATIONALS


class Report(BaseModel):
    command: str
    inputs_digest: str
    result: Dict[str, Any]
    version: str
    seed: Optional[int] = None


class LedgerRowPayload(BaseModel):
    name: str
    lhs: Optional[str]
    relation: str
    rhs: str
    passed: Optional[bool]


class CurvePayload(BaseModel):
    degree: int
    count: int
    incident: List[int]
    witness: str


class WitnessCertificatePayload(BaseModel):
    """Stored witness; :meth:`verify` recomputes it from the points alone."""

    num_vars: int
    points: List[List[int]]
    index: int
    degree: int
    witness: str
    construction: str
    values: List[str]
    part_factor: Optional[str] = None
    cone_factor: Optional[str] = None
    fallback_reason: Optional[str] = None
    projection_center: Optional[List[List[int]]] = None

    @classmethod
    def from_certificate(cls, certificate: Any) -> "WitnessCertificatePayload":
        return cls(
            num_vars=certificate.witness.num_vars,
            points=[point_list(p) for p in certificate.points],
            index=certificate.index,
            degree=certificate.degree,
            witness=format_form(certificate.witness),
            construction=certificate.construction,
            values=[rational_text(v) for v in certificate.values],
            part_factor=format_form(certificate.part_factor) if certificate.part_factor is not None else None,
            cone_factor=format_form(certificate.cone_factor) if certificate.cone_factor is not None else None,
            fallback_reason=certificate.fallback_reason,
            projection_center=(
                [point_list(c) for c in certificate.projection.center] if certificate.projection is not None else None
            ),
        )

    def verify(self) -> None:
        witness = parse_form(self.witness, self.num_vars)
        if len(self.values) != len(self.points):
            raise CertificateError("values and points differ in length")
        for i, (coords, stored) in enumerate(zip(self.points, self.values)):
            value = evaluate(witness, coords)
            if rational_text(value) != stored:
                raise CertificateError(f"stored value at point {i} does not recompute")
            if (i == self.index) == (value == 0):
                raise CertificateError(f"witness does not separate at point {i}")
        if self.part_factor is not None and self.cone_factor is not None:
            product = parse_form(self.part_factor, self.num_vars) * parse_form(self.cone_factor, self.num_vars)
            if product != witness:
                raise CertificateError("witness is not the product of its factors")


__all__ = [
    "rational_text",
    "point_list",
    "PrimeField",
    "PointSetFile",
    "Report",
    "LedgerRowPayload",
    "CurvePayload",
    "WitnessCertificatePayload",
]
