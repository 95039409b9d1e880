from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from qfactorial.core.errors import BudgetExceededError, CertificateError, FieldMismatchError, InputError
from qfactorial.core.resilience import RetryPolicy, SearchBudget
from qfactorial.core.settings import Settings
from qfactorial.exactalg import INCONSISTENT, RATIONALS, Field, solve_affine
from qfactorial.forms import Form, evaluate
from qfactorial.projgeom import ProjPoint, Projection, cone_pullback, project, random_projection
from qfactorial.services.conditions import (
    Verdict,
    evaluation_matrix,
    q_factoriality_verdict,
    separating_form,
)
from qfactorial.services.incidence import (
    CurveMax,
    PartitionCertificate,
    max_points_on_curve,
    partition,
    search_budget,
)
from qfactorial.services.modes import Mode

logger = logging.getLogger(__name__)

DIRECT_SOLVE = "direct_solve"
CONE_COMPOSITE = "cone_composite"


@dataclass(frozen=True)
class WitnessCertificate:
    """Form of the target degree vanishing on every node except ``points[index]``."""

    points: Tuple[ProjPoint, ...]
    index: int
    degree: int
    witness: Form
    construction: str
    values: Tuple[object, ...]
    cone_factor: Optional[Form] = None
    part_factor: Optional[Form] = None
    fallback_reason: Optional[str] = None
    projection: Optional[Projection] = None
    partition: Optional[PartitionCertificate] = None

    @property
    def point(self) -> ProjPoint:
        return self.points[self.index]

    def verify(self) -> None:
        """Recompute every stored evaluation and the separation property."""
        values = tuple(evaluate(self.witness, point.coords) for point in self.points)
        if values != self.values:
            raise CertificateError("stored evaluations do not match the witness")
        for i, value in enumerate(values):
            if (i == self.index) == (value == 0):
                raise CertificateError(f"witness fails at {self.points[i]}")
        if self.witness.degree != self.degree and not self.witness.is_zero():
            raise CertificateError("witness has the wrong degree")
        if self.construction == CONE_COMPOSITE:
            if self.part_factor is None or self.cone_factor is None:
                raise CertificateError("cone certificate without its factors")
            if self.part_factor.degree + self.cone_factor.degree != self.degree:
                raise CertificateError("factor degrees do not add up")
            if self.part_factor * self.cone_factor != self.witness:
                raise CertificateError("witness is not the product of its factors")


@dataclass(frozen=True)
class PointStatus:
    point: ProjPoint
    has_separator: bool
    dependent_on_earlier: bool


@dataclass(frozen=True)
class FullReport:
    mode: Mode
    seed: int
    verdict: Verdict
    projection: Optional[Projection]
    projection_injective: Optional[bool]
    profile: Tuple[Tuple[int, Optional[CurveMax]], ...]
    partition: Optional[PartitionCertificate]
    partition_error: Optional[str]
    statuses: Tuple[PointStatus, ...]

    @property
    def defect(self) -> int:
        return self.verdict.defect

    @property
    def no_separator_count(self) -> int:
        return sum(1 for status in self.statuses if not status.has_separator)

    @property
    def dependent_count(self) -> int:
        return sum(1 for status in self.statuses if status.dependent_on_earlier)

    @property
    def q_factorial(self) -> bool:
        return self.verdict.q_factorial


def _certificate(
    points: Tuple[ProjPoint, ...], index: int, degree: int, witness: Form, construction: str, **extra: object
) -> WitnessCertificate:
    values = tuple(evaluate(witness, point.coords) for point in points)
    certificate = WitnessCertificate(points, index, degree, witness, construction, values, **extra)  # type: ignore[arg-type]
    certificate.verify()
    return certificate


class WitnessPipeline:
    """Coordinates projection, partition and witness construction for a node set."""

    def __init__(self, settings: Settings, field: Field = RATIONALS) -> None:
        self._settings = settings
        self._field = field

    @property
    def settings(self) -> Settings:
        return self._settings

    def budget(self, label: str = "incidence search") -> SearchBudget:
        return search_budget(self._settings, label)

    def retry_policy(self) -> RetryPolicy:
        return RetryPolicy(
            max_attempts=self._settings.projection_attempts,
            base_bound=self._settings.projection_bound,
            attempts_per_round=self._settings.attempts_per_round,
        )

    # ------------------------------------------------------------------
    def witness_direct(self, nodes: Sequence[ProjPoint], index: int, degree: int) -> Optional[WitnessCertificate]:
        """Separating form by linear solve; ``None`` means no separator exists."""
        points = tuple(nodes)
        if not 0 <= index < len(points):
            raise InputError(f"point index {index} outside the node list")
        num_vars = len(points[index])
        form = separating_form(points, index, degree, num_vars, self._field)
        if form is None:
            return None
        return _certificate(points, index, degree, form, DIRECT_SOLVE)

    def witness_cone(
        self, nodes: Sequence[ProjPoint], index: int, mode: Mode, seed: int
    ) -> Optional[WitnessCertificate]:
        """Product of part forms and a cone over a residual plane curve.

        Falls back to :meth:`witness_direct` when the ledger fails or a factor
        cannot be built; the certificate then records why.
        """
        points = tuple(nodes)
        if not 0 <= index < len(points):
            raise InputError(f"point index {index} outside the node list")
        target = mode.critical_degree
        if not self._field.is_rational:
            raise FieldMismatchError("cone witnesses need the incidence search, which runs over Q only")
        projection = random_projection(mode.ambient_dim, points, seed, self.retry_policy(), self._field)
        images = project(projection, points).images
        certificate = partition(images, mode, self.budget())

        reason = None
        factors: Optional[Tuple[Form, Form]] = None
        if not certificate.ledger_passed:
            failed = [row.name for row in certificate.ledger if row.passed is not True]
            reason = "ledger failed: " + ", ".join(failed)
        else:
            factors, reason = self._cone_factors(points, images, index, mode, projection, certificate)

        if factors is not None:
            part_factor, cone_factor = factors
            logger.info("cone witness for %s built from %s parts", points[index], len(certificate.parts))
            return _certificate(
                points,
                index,
                target,
                part_factor * cone_factor,
                CONE_COMPOSITE,
                part_factor=part_factor,
                cone_factor=cone_factor,
                projection=projection,
                partition=certificate,
            )

        logger.info("cone construction for %s fell back to a direct solve: %s", points[index], reason)
        direct = self.witness_direct(points, index, target)
        if direct is None:
            return None
        return WitnessCertificate(
            direct.points,
            direct.index,
            direct.degree,
            direct.witness,
            DIRECT_SOLVE,
            direct.values,
            fallback_reason=reason,
            projection=projection,
            partition=certificate,
        )

    def _cone_factors(
        self,
        points: Tuple[ProjPoint, ...],
        images: Tuple[ProjPoint, ...],
        index: int,
        mode: Mode,
        projection: Projection,
        certificate: PartitionCertificate,
    ) -> Tuple[Optional[Tuple[Form, Form]], Optional[str]]:
        num_vars = mode.num_vars
        part_factor = Form.constant(1, num_vars, self._field)
        for part in certificate.parts:
            members = [i for i in part.indices if i != index]
            local = [points[i] for i in members] + [points[index]]
            degree = mode.step * (part.degree - 1)
            form = separating_form(local, len(local) - 1, degree, num_vars, self._field)
            if form is None:
                return None, f"no degree-{degree} form separates the point from its degree-{part.degree} part"
            part_factor = part_factor * form

        residual = [i for i in certificate.residual if i != index]
        plane_points = [images[i] for i in residual] + [images[index]]
        curve = separating_form(plane_points, len(plane_points) - 1, certificate.residual_degree, 3, self._field)
        if curve is None:
            return None, f"no degree-{certificate.residual_degree} plane curve separates the projected point"
        return (part_factor, cone_pullback(curve, projection)), None

    # ------------------------------------------------------------------
    def dependent_flags(self, nodes: Sequence[ProjPoint], degree: int) -> List[bool]:
        """Whether each evaluation row lies in the span of the rows before it."""
        points = tuple(nodes)
        if not points:
            return []
        m = evaluation_matrix(points, degree, len(points[0]), self._field)
        flags: List[bool] = []
        for i in range(len(points)):
            earlier = m.select_rows(range(i)).transpose()
            flags.append(solve_affine(earlier, m.row(i)) is not INCONSISTENT)
        return flags

    def full_report(self, nodes: Sequence[ProjPoint], mode: Mode, seed: int) -> FullReport:
        points = tuple(nodes)
        workers = self._settings.workers
        verdict = q_factoriality_verdict(mode, points, self._field, workers)
        degree = mode.critical_degree

        projection: Optional[Projection] = None
        injective: Optional[bool] = None
        profile: List[Tuple[int, Optional[CurveMax]]] = []
        certificate: Optional[PartitionCertificate] = None
        partition_error: Optional[str] = None
        if points and not self._field.is_rational:
            partition_error = "incidence search and partition run over Q only"
        elif points:
            projection = random_projection(mode.ambient_dim, points, seed, self.retry_policy(), self._field)
            result = project(projection, points)
            injective = result.injective
            budget = self.budget()
            for k in range(1, mode.degree_cap + 1):
                try:
                    profile.append((k, max_points_on_curve(result.images, k, budget)))
                except BudgetExceededError:
                    logger.warning("incidence profile truncated at degree %s", k)
                    profile.append((k, None))
            try:
                certificate = partition(result.images, mode, self.budget())
            except BudgetExceededError as exc:
                partition_error = str(exc)

        indices = range(len(points))
        if workers > 1 and len(points) > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                witnesses = list(executor.map(lambda i: self.witness_direct(points, i, degree), indices))
        else:
            witnesses = [self.witness_direct(points, i, degree) for i in indices]
        dependent = self.dependent_flags(points, degree)
        statuses = tuple(
            PointStatus(point, witness is not None, flag) for point, witness, flag in zip(points, witnesses, dependent)
        )

        report = FullReport(
            mode=mode,
            seed=seed,
            verdict=verdict,
            projection=projection,
            projection_injective=injective,
            profile=tuple(profile),
            partition=certificate,
            partition_error=partition_error,
            statuses=statuses,
        )
        if report.dependent_count != report.defect or report.defect != len(points) - verdict.report.rank:
            raise CertificateError("defect, dependent count and rank disagree")
        return report


__all__ = [
    "DIRECT_SOLVE",
    "CONE_COMPOSITE",
    "WitnessCertificate",
    "PointStatus",
    "FullReport",
    "WitnessPipeline",
]
