"""Defect engine: how many independent conditions a point set imposes on forms."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from qfactorial.core.errors import CertificateError, DimensionMismatchError, InputError
from qfactorial.core.resilience import SearchBudget
from qfactorial.exactalg import (
    INCONSISTENT,
    RATIONALS,
    Field,
    Matrix,
    Vector,
    kernel_basis,
    left_kernel_basis,
    rank,
    solve_affine,
)
from qfactorial.forms import Form, evaluate, evaluate_monomial, monomial_basis
from qfactorial.projgeom import ProjPoint
from qfactorial.services.modes import Mode
from qfactorial.services.scan import count_common_zeros

logger = logging.getLogger(__name__)

HEURISTIC = "HEURISTIC"


def _basis_or_empty(num_vars: int, degree: int) -> List[Tuple[int, ...]]:
    return monomial_basis(num_vars, degree) if degree >= 0 else []


def _check_points(pts: Sequence[ProjPoint], num_vars: int) -> None:
    for point in pts:
        if len(point) != num_vars:
            raise DimensionMismatchError(f"point {point} has {len(point)} coordinates, expected {num_vars}")


def evaluation_matrix(
    pts: Sequence[ProjPoint], degree: int, num_vars: int, field: Field = RATIONALS
) -> Matrix:
    """Rows are points, columns the degree-``degree`` monomials in graded-lex order."""
    _check_points(pts, num_vars)
    basis = _basis_or_empty(num_vars, degree)
    rows = []
    for point in pts:
        coords = [field.coerce(c) for c in point.coords]
        rows.append([evaluate_monomial(monomial, coords, field) for monomial in basis])
    return Matrix.from_rows(rows, field, cols=len(basis))


def separating_form(
    pts: Sequence[ProjPoint],
    index: int,
    degree: int,
    num_vars: int,
    field: Field = RATIONALS,
) -> Optional[Form]:
    """Form of ``degree`` vanishing on ``pts`` except ``pts[index]``, where it is 1.

    ``None`` when the condition at ``pts[index]`` depends on the others.
    """
    basis = _basis_or_empty(num_vars, degree)
    if not basis:
        return None
    m = evaluation_matrix(pts, degree, num_vars, field)
    order = [i for i in range(len(pts)) if i != index] + [index]
    target = [0] * (len(pts) - 1) + [1]
    solution = solve_affine(m.select_rows(order), target)
    if solution is INCONSISTENT:
        return None
    return Form.from_coefficients(basis, solution, num_vars, degree, field)  # type: ignore[arg-type]


@dataclass(frozen=True)
class DefectReport:
    points: Tuple[ProjPoint, ...]
    degree: int
    num_vars: int
    rank: int
    defect: int
    independent: bool
    separators: Tuple[Form, ...] = ()
    dependency: Optional[Vector] = None
    field: Field = RATIONALS

    @property
    def num_points(self) -> int:
        return len(self.points)

    def verify(self) -> None:
        """Recheck separators and the dependency vector exactly."""
        if self.defect != self.num_points - self.rank or self.independent != (self.defect == 0):
            raise CertificateError("defect bookkeeping is inconsistent")
        if self.independent:
            if len(self.separators) != self.num_points:
                raise CertificateError("missing separators for an independent set")
            for i, form in enumerate(self.separators):
                for j, point in enumerate(self.points):
                    value = evaluate(form, point.coords)
                    if (i == j) == (value == 0):
                        raise CertificateError(f"separator {i} fails at point {point}")
            return
        if self.dependency is None or all(v == 0 for v in self.dependency):
            raise CertificateError("dependent set without a dependency certificate")
        m = evaluation_matrix(self.points, self.degree, self.num_vars, self.field)
        if any(m.transpose().matvec(self.dependency)):
            raise CertificateError("dependency vector is not in the left kernel")


def defect(
    pts: Sequence[ProjPoint],
    degree: int,
    num_vars: int,
    field: Field = RATIONALS,
    workers: int = 1,
) -> DefectReport:
    """Rank and defect of ``pts`` against forms of ``degree``, with certificates."""
    points = tuple(pts)
    m = evaluation_matrix(points, degree, num_vars, field)
    value = rank(m)
    gap = len(points) - value
    logger.debug("defect: %s points, degree %s, rank %s", len(points), degree, value)

    separators: Tuple[Form, ...] = ()
    dependency: Optional[Vector] = None
    if gap == 0:
        def solve(index: int) -> Form:
            found = separating_form(points, index, degree, num_vars, field)
            if found is None:
                raise CertificateError(f"no separator for independent point {points[index]}")
            return found

        indices = range(len(points))
        if workers > 1 and len(points) > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                separators = tuple(executor.map(solve, indices))
        else:
            separators = tuple(solve(i) for i in indices)
    else:
        dependency = left_kernel_basis(m)[0]

    report = DefectReport(points, degree, num_vars, value, gap, gap == 0, separators, dependency, field)
    report.verify()
    return report


@dataclass(frozen=True)
class Verdict:
    mode: Mode
    num_nodes: int
    bound: Fraction
    effective_bound: Fraction
    bound_ok: bool
    degree: int
    report: DefectReport

    @property
    def defect(self) -> int:
        return self.report.defect

    @property
    def q_factorial(self) -> bool:
        return self.report.defect == 0


def q_factoriality_verdict(
    mode: Mode, nodes: Sequence[ProjPoint], field: Field = RATIONALS, workers: int = 1
) -> Verdict:
    """Bound check and defect at the critical degree; the verdict follows the defect only."""
    _check_points(nodes, mode.num_vars)
    report = defect(nodes, mode.critical_degree, mode.num_vars, field, workers)
    bound_ok = len(nodes) <= mode.effective_bound
    if bound_ok and report.defect:
        logger.info("%s: %s points under the node bound still have defect %s", mode.label, len(nodes), report.defect)
    return Verdict(
        mode=mode,
        num_nodes=len(nodes),
        bound=mode.theorem_bound,
        effective_bound=mode.effective_bound,
        bound_ok=bound_ok,
        degree=mode.critical_degree,
        report=report,
    )


# ----------------------------------------------------------------------
# Base-locus probes
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class ProbeResult:
    primes: Tuple[int, int]
    counts: Tuple[int, int]
    estimate: Optional[int]
    empty: bool
    label: str = HEURISTIC

    @property
    def zero_dimensional(self) -> bool:
        return not self.empty and self.estimate == 0


def estimate_dimension(primes: Tuple[int, int], counts: Tuple[int, int]) -> Tuple[Optional[int], bool]:
    (p1, p2), (n1, n2) = primes, counts
    if n1 == 0 and n2 == 0:
        return None, True
    if n1 == 0 or n2 == 0 or n2 <= n1:
        return 0, False
    return round(math.log(n2 / n1) / math.log(p2 / p1)), False


def integral_form(form: Form) -> Form:
    """Scale a rational form to coprime integer coefficients."""
    if not form.field.is_rational or form.is_zero():
        return form
    values = [Fraction(c) for _, c in form.terms]
    scale = math.lcm(*(v.denominator for v in values))
    common = math.gcd(*(int(v * scale) for v in values))
    return form.scale(Fraction(scale, common))


def base_locus_dim_probe(
    generators: Sequence[Form],
    num_vars: int,
    ambient_constraint: Optional[Form] = None,
    primes: Tuple[int, int] = (5, 29),
    budget: Optional[SearchBudget] = None,
    workers: int = 1,
) -> ProbeResult:
    """Estimate the dimension of a common zero set from point counts at two primes."""
    if primes[0] >= primes[1]:
        raise InputError("probe primes must be increasing")
    forms = [integral_form(g) for g in generators]
    if ambient_constraint is not None:
        forms.append(integral_form(ambient_constraint))
    counts = tuple(count_common_zeros(forms, num_vars, p, budget, workers) for p in primes)
    estimate, empty = estimate_dimension(primes, counts)  # type: ignore[arg-type]
    logger.debug("base locus counts %s at primes %s -> %s", counts, primes, "empty" if empty else estimate)
    return ProbeResult(tuple(primes), counts, estimate, empty)  # type: ignore[arg-type]


def forms_through(pts: Sequence[ProjPoint], degree: int, num_vars: int) -> List[Form]:
    """Basis of the degree-``degree`` forms vanishing on ``pts``."""
    basis = _basis_or_empty(num_vars, degree)
    if not pts:
        return [Form.from_terms(num_vars, {monomial: 1}, degree=degree) for monomial in basis]
    kernel = kernel_basis(evaluation_matrix(pts, degree, num_vars))
    return [integral_form(Form.from_coefficients(basis, vector, num_vars, degree)) for vector in kernel]


@dataclass(frozen=True)
class NonVanishingCheck:
    k: int
    linear_system_size: int
    probe: ProbeResult
    predicted_independent: bool
    predicted_degree: int
    report: DefectReport

    @property
    def agrees(self) -> bool:
        """False only when a zero-dimensional base locus coexists with positive defect."""
        return not self.predicted_independent or self.report.independent


def non_vanishing_check(
    pts: Sequence[ProjPoint],
    k: int,
    num_vars: int,
    primes: Tuple[int, int] = (5, 29),
    budget: Optional[SearchBudget] = None,
    workers: int = 1,
) -> NonVanishingCheck:
    """Zero-dimensional base locus in degree k predicts independence in degree m(k - 1)."""
    if k < 1:
        raise InputError("k must be at least 1")
    system = forms_through(pts, k, num_vars)
    probe = base_locus_dim_probe(system, num_vars, primes=primes, budget=budget, workers=workers)
    target = (num_vars - 1) * (k - 1)
    report = defect(pts, target, num_vars, workers=workers)
    return NonVanishingCheck(k, len(system), probe, probe.zero_dimensional, target, report)


@dataclass(frozen=True)
class BaseLocusCriterion:
    mode: Mode
    k: int
    linear_system_size: int
    probe: ProbeResult
    elementary_bound: int
    within_elementary_bound: bool
    label: str = HEURISTIC

    @property
    def q_factorial(self) -> Optional[bool]:
        """True when the criterion applies; None when it is silent."""
        if self.within_elementary_bound or self.probe.zero_dimensional:
            return True
        return None


def base_locus_criterion(
    mode: Mode,
    nodes: Sequence[ProjPoint],
    k: int,
    ambient: Optional[Form] = None,
    primes: Tuple[int, int] = (5, 29),
    budget: Optional[SearchBudget] = None,
    workers: int = 1,
) -> BaseLocusCriterion:
    """Forms of degree k through the nodes; a zero-dimensional base locus on the ambient variety suffices."""
    if not 1 <= k < mode.max_base_locus_degree:
        raise InputError(f"k must satisfy 1 <= k < {mode.max_base_locus_degree} for {mode.label}")
    _check_points(nodes, mode.num_vars)
    if ambient is not None and ambient.num_vars != mode.num_vars:
        raise DimensionMismatchError("ambient equation lives in the wrong projective space")
    system = forms_through(nodes, k, mode.num_vars)
    probe = base_locus_dim_probe(system, mode.num_vars, ambient, primes, budget, workers)
    return BaseLocusCriterion(
        mode=mode,
        k=k,
        linear_system_size=len(system),
        probe=probe,
        elementary_bound=mode.elementary_bound,
        within_elementary_bound=len(nodes) <= mode.elementary_bound,
    )


__all__ = [
    "HEURISTIC",
    "evaluation_matrix",
    "separating_form",
    "DefectReport",
    "defect",
    "Verdict",
    "q_factoriality_verdict",
    "ProbeResult",
    "estimate_dimension",
    "integral_form",
    "base_locus_dim_probe",
    "forms_through",
    "NonVanishingCheck",
    "non_vanishing_check",
    "BaseLocusCriterion",
    "base_locus_criterion",
]
