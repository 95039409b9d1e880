"""Plane-curve incidence search, general-position checks and the partition ledger."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Set, Tuple

from qfactorial.core.errors import BudgetExceededError, CertificateError, DimensionMismatchError, InputError, QFactorialError
from qfactorial.core.resilience import SearchBudget
from qfactorial.core.settings import Settings, get_settings
from qfactorial.exactalg import Matrix, kernel_basis
from qfactorial.forms import Form, evaluate, evaluate_monomial, monomial_basis
from qfactorial.projgeom import ProjPoint
from qfactorial.services.modes import Mode

logger = logging.getLogger(__name__)


def pin_down_count(k: int) -> int:
    """Number of general points fixing a unique plane curve of degree k."""
    return k * (k + 3) // 2


def search_budget(settings: Settings, label: str = "incidence search") -> SearchBudget:
    """Budget for exhaustive curve searches, with the size limits from ``settings``."""
    return SearchBudget(
        settings.search_budget, label=label, max_points=settings.max_points, max_degree=settings.max_curve_degree
    )


def _integral(vector: Sequence) -> List[int]:
    values = [Fraction(v) for v in vector]
    scale = math.lcm(*(v.denominator for v in values))
    integers = [int(v * scale) for v in values]
    common = math.gcd(*integers) or 1
    return [v // common for v in integers]


@dataclass(frozen=True)
class CurveMax:
    """Largest number of input points on one curve of ``degree``."""

    degree: int
    count: int
    incident: Tuple[int, ...]
    witness: Form

    def verify(self, pts: Sequence[ProjPoint]) -> None:
        found = tuple(i for i, point in enumerate(pts) if evaluate(self.witness, point.coords) == 0)
        if found != self.incident or len(found) != self.count:
            raise CertificateError(f"degree-{self.degree} witness meets {len(found)} points, claimed {self.count}")


class _CurveSearch:
    def __init__(self, pts: Sequence[ProjPoint], k: int, budget: SearchBudget) -> None:
        self.n = len(pts)
        self.k = k
        self.budget = budget
        self.basis = monomial_basis(3, k)
        self.rows = [[evaluate_monomial(m, point.coords) for m in self.basis] for point in pts]
        self.best: Optional[Tuple[int, Tuple[int, ...], List[int]]] = None
        self.visited: Set[frozenset] = set()

    @property
    def best_count(self) -> Optional[int]:
        return self.best[0] if self.best else None

    def _kernel(self, indices: Sequence[int]) -> List[List[int]]:
        self.budget.charge(1, partial=self.best_count)
        m = Matrix.from_rows([self.rows[i] for i in indices], cols=len(self.basis))
        return [_integral(v) for v in kernel_basis(m)]

    def _vanishes(self, index: int, vector: Sequence[int]) -> bool:
        return sum(a * b for a, b in zip(self.rows[index], vector) if a and b) == 0

    def _offer(self, vector: List[int]) -> None:
        incident = tuple(i for i in range(self.n) if self._vanishes(i, vector))
        if self.best is None:
            self.best = (len(incident), incident, vector)
            return
        count, current, _ = self.best
        if len(incident) > count or (len(incident) == count and incident < current):
            self.best = (len(incident), incident, vector)

    def _done(self) -> bool:
        return self.best is not None and self.best[0] == self.n

    def _explore(self, indices: Tuple[int, ...]) -> None:
        kernel = self._kernel(indices)
        base = tuple(i for i in range(self.n) if all(self._vanishes(i, v) for v in kernel))
        key = frozenset(base)
        if key in self.visited:
            return
        self.visited.add(key)
        self._offer(kernel[0])
        if len(kernel) == 1 or len(base) == self.n:
            return
        # the curve family through `base` is at least a pencil: refine by each outside point
        members = set(base)
        for q in range(self.n):
            if self._done():
                return
            if q not in members:
                self._explore(tuple(sorted(members | {q})))

    def run(self) -> Tuple[int, Tuple[int, ...], List[int]]:
        size = pin_down_count(self.k)
        if self.n <= size:
            self._offer(self._kernel(range(self.n))[0] if self.n else _integral([1] + [0] * (len(self.basis) - 1)))
        else:
            for subset in combinations(range(self.n), size):
                if self._done():
                    break
                self._explore(subset)
        assert self.best is not None
        logger.debug(
            "degree-%s search over %s points: %s closed sets, max %s", self.k, self.n, len(self.visited), self.best[0]
        )
        return self.best


def max_points_on_curve(
    pts: Sequence[ProjPoint],
    k: int,
    budget: Optional[SearchBudget] = None,
) -> CurveMax:
    """Exact maximum incidence of a degree-k plane curve with ``pts``.

    Ties are broken by the lexicographically smallest incident index tuple.
    """
    if k < 1:
        raise InputError("curve degree must be at least 1")
    for point in pts:
        if len(point) != 3:
            raise DimensionMismatchError(f"point {point} is not in P^2")

    budget = budget or search_budget(get_settings())
    if len(pts) > pin_down_count(k) and not budget.admits(len(pts), k):
        raise BudgetExceededError(
            f"exact curve search limited to {budget.max_points} points and degree {budget.max_degree}"
        )

    count, incident, vector = _CurveSearch(pts, k, budget).run()
    witness = Form.from_coefficients(monomial_basis(3, k), vector, 3, k)
    result = CurveMax(k, count, incident, witness)
    result.verify(pts)
    return result


@dataclass(frozen=True)
class IncidenceProfile:
    entries: Tuple[CurveMax, ...]

    def max_on_curve(self, k: int) -> int:
        return self.by_degree()[k].count

    def witness_curve(self, k: int) -> Form:
        return self.by_degree()[k].witness

    def by_degree(self) -> Dict[int, CurveMax]:
        return {entry.degree: entry for entry in self.entries}


def incidence_profile(
    pts: Sequence[ProjPoint], degrees: Sequence[int], budget: Optional[SearchBudget] = None
) -> IncidenceProfile:
    return IncidenceProfile(tuple(max_points_on_curve(pts, k, budget) for k in sorted(set(degrees))))


# ----------------------------------------------------------------------
# General-position properties
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class NablaPreset:
    name: str
    multiplier: int
    k_max: int


# At most 7 / 14 projected nodes on a line / conic for the double solid with r = 4,
# at most 5 / 10 for the quintic threefold.
CY_DOUBLE_SOLID = NablaPreset("cy-double-solid", 7, 2)
CY_QUINTIC = NablaPreset("cy-quintic", 5, 2)
PRESETS: Dict[str, NablaPreset] = {preset.name: preset for preset in (CY_DOUBLE_SOLID, CY_QUINTIC)}


@dataclass(frozen=True)
class NablaRow:
    degree: int
    allowed: int
    max_on_curve: Optional[int]
    passed: bool
    curve: Optional[CurveMax] = None


@dataclass(frozen=True)
class NablaCheck:
    multiplier: int
    k_max: int
    rows: Tuple[NablaRow, ...]

    @property
    def smallest_failing(self) -> Optional[int]:
        return next((row.degree for row in self.rows if not row.passed), None)

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)


def check_property_nabla(
    pts: Sequence[ProjPoint],
    multiplier: int,
    k_max: int,
    budget: Optional[SearchBudget] = None,
    start: int = 1,
    stop_at_failure: bool = False,
) -> NablaCheck:
    """At most ``i * multiplier`` points on any curve of degree i, for each i <= k_max.

    Degrees where ``|pts| <= i * multiplier`` pass without a search and carry
    no curve.
    """
    if multiplier < 1:
        raise InputError("multiplier must be positive")
    rows: List[NablaRow] = []
    for degree in range(start, k_max + 1):
        allowed = degree * multiplier
        if len(pts) <= allowed:
            rows.append(NablaRow(degree, allowed, None, True))
            continue
        curve = max_points_on_curve(pts, degree, budget)
        passed = curve.count <= allowed
        rows.append(NablaRow(degree, allowed, curve.count, passed, curve))
        if not passed and stop_at_failure:
            break
    return NablaCheck(multiplier, k_max, tuple(rows))


# ----------------------------------------------------------------------
# Inequality ledgers
# ----------------------------------------------------------------------
_RELATIONS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
}


@dataclass(frozen=True)
class LedgerRow:
    """One checked inequality ``lhs relation rhs``; ``passed`` is None when unchecked."""

    name: str
    lhs: Optional[Fraction]
    relation: str
    rhs: Fraction
    passed: Optional[bool]

    @classmethod
    def check(cls, name: str, lhs: Fraction, relation: str, rhs: Fraction) -> "LedgerRow":
        lhs, rhs = Fraction(lhs), Fraction(rhs)
        return cls(name, lhs, relation, rhs, _RELATIONS[relation](lhs, rhs))

    @classmethod
    def unchecked(cls, name: str, relation: str, rhs: Fraction) -> "LedgerRow":
        return cls(name, None, relation, Fraction(rhs), None)

    def recheck(self) -> bool:
        """True when the stored verdict matches a fresh comparison."""
        if self.passed is None or self.lhs is None:
            return self.passed is None
        return _RELATIONS[self.relation](self.lhs, self.rhs) == self.passed


def ledger_status(rows: Sequence[LedgerRow]) -> str:
    if any(row.passed is False for row in rows):
        return "fail"
    if any(row.passed is None for row in rows):
        return "conditional"
    return "pass"


def _curve_bound_row(
    name: str, pts: Sequence[ProjPoint], k: int, bound: int, budget: Optional[SearchBudget]
) -> Tuple[LedgerRow, Optional[CurveMax]]:
    if len(pts) <= bound:
        # no curve can hold more points than there are
        return LedgerRow.check(name, Fraction(len(pts)), "<=", Fraction(bound)), None
    try:
        curve = max_points_on_curve(pts, k, budget)
    except BudgetExceededError:
        logger.warning("%s left unchecked: search budget exceeded", name)
        return LedgerRow.unchecked(name, "<=", Fraction(bound)), None
    return LedgerRow.check(name, Fraction(curve.count), "<=", Fraction(bound)), curve


@dataclass(frozen=True)
class BeseLedger:
    degree: int
    size: int
    theorem_rows: Tuple[LedgerRow, ...]
    corollary_rows: Tuple[LedgerRow, ...]

    @property
    def theorem_status(self) -> str:
        return ledger_status(self.theorem_rows)

    @property
    def corollary_status(self) -> str:
        return ledger_status(self.corollary_rows)


def theorem_size_bound(d: int) -> Fraction:
    return Fraction(d * d + 9 * d + 10, 6)


def corollary_size_bound(d: int) -> Fraction:
    return Fraction(d * d + 9 * d + 16, 6)


def curve_bound(d: int, k: int) -> int:
    return k * (d + 3 - k) - 2


def bese_conditions(pts: Sequence[ProjPoint], d: int, budget: Optional[SearchBudget] = None) -> BeseLedger:
    """Conditions under which degree-d plane curves through all but one point separate it."""
    if d < 3:
        raise InputError("the degree must be at least 3")
    curve_rows = []
    for k in range(1, (d + 3) // 2 + 1):
        row, _ = _curve_bound_row(f"points on a degree-{k} curve", pts, k, curve_bound(d, k), budget)
        curve_rows.append(row)
    size = Fraction(len(pts))
    theorem = LedgerRow.check("size (theorem form)", size, "<=", theorem_size_bound(d))
    corollary = LedgerRow.check("size (corollary form)", size, "<=", corollary_size_bound(d))
    return BeseLedger(d, len(pts), (theorem, *curve_rows), (corollary, *curve_rows))


# ----------------------------------------------------------------------
# Partition of projected nodes
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class Part:
    degree: int
    indices: Tuple[int, ...]
    curve: Form


@dataclass(frozen=True)
class PartitionCertificate:
    mode: Mode
    points: Tuple[ProjPoint, ...]
    parts: Tuple[Part, ...]
    residual: Tuple[int, ...]
    residual_degree: int
    residual_check: NablaCheck
    ledger: Tuple[LedgerRow, ...]
    counts: Dict[int, int] = field(default_factory=dict)

    @property
    def ledger_status(self) -> str:
        return ledger_status(self.ledger)

    @property
    def ledger_passed(self) -> bool:
        return self.ledger_status == "pass"

    def part_of(self, index: int) -> Optional[Part]:
        return next((part for part in self.parts if index in part.indices), None)

    def verify(self) -> None:
        """Disjointness, part sizes, witness curves, residual property and ledger arithmetic."""
        seen: List[int] = []
        multiplier = self.mode.multiplier
        for part in self.parts:
            if len(part.indices) <= part.degree * multiplier:
                raise CertificateError(f"part at degree {part.degree} has only {len(part.indices)} points")
            for index in part.indices:
                if evaluate(part.curve, self.points[index].coords) != 0:
                    raise CertificateError(f"part curve misses point {self.points[index]}")
            seen.extend(part.indices)
        seen.extend(self.residual)
        if sorted(seen) != list(range(len(self.points))):
            raise CertificateError("parts and residual do not partition the projected points")
        if not self.residual_check.passed:
            raise CertificateError("residual violates the general-position property")
        if not all(row.recheck() for row in self.ledger):
            raise CertificateError("ledger row does not recompute")


def partition_ledger(
    mode: Mode,
    parts: Sequence[Part],
    residual_pts: Sequence[ProjPoint],
    budget: Optional[SearchBudget] = None,
) -> Tuple[int, Tuple[LedgerRow, ...]]:
    """Residual degree and the inequalities the cone construction relies on."""
    weighted = sum(part.degree for part in parts)
    consumed = sum(mode.step * (part.degree - 1) for part in parts)
    d = mode.critical_degree - consumed
    rows = [
        LedgerRow.check("sum of j*c_j", Fraction(weighted), "<", mode.part_sum_bound),
        LedgerRow.check("residual degree", Fraction(d), ">=", Fraction(mode.minimum_residual_degree)),
    ]
    if parts:
        # a line part gets a degree-0 factor, which cannot vanish on its other points
        lowest = min(part.degree for part in parts)
        rows.insert(1, LedgerRow.check("lowest part degree", Fraction(lowest), ">=", Fraction(2)))
    if d >= 1:
        rows.append(LedgerRow.check("residual size", Fraction(len(residual_pts)), "<=", theorem_size_bound(d)))
        row, _ = _curve_bound_row("residual points on a line", residual_pts, 1, d, budget)
        rows.append(row)
        for k in range(2, (d + 3) // 2 + 1):
            row, _ = _curve_bound_row(
                f"residual points on a degree-{k} curve", residual_pts, k, curve_bound(d, k), budget
            )
            rows.append(row)
    return d, tuple(rows)


def partition(
    projected: Sequence[ProjPoint],
    mode: Mode,
    budget: Optional[SearchBudget] = None,
) -> PartitionCertificate:
    """Peel off oversized on-a-curve subsets until the rest is in general position."""
    points = tuple(projected)
    multiplier, cap = mode.multiplier, mode.degree_cap
    remaining = list(range(len(points)))
    parts: List[Part] = []
    degree = 1
    iterations = 0

    while True:
        iterations += 1
        if iterations > len(points) + 1:
            raise QFactorialError(f"extraction loop exceeded {len(points)} iterations")
        subset = [points[i] for i in remaining]
        check = check_property_nabla(subset, multiplier, cap, budget, start=degree, stop_at_failure=True)
        failing = next((row for row in check.rows if not row.passed), None)
        if failing is None:
            break
        assert failing.curve is not None
        degree = failing.degree
        taken = tuple(remaining[i] for i in failing.curve.incident)
        logger.info("%s: extracted %s points on a degree-%s curve", mode.label, len(taken), degree)
        parts.append(Part(degree, taken, failing.curve.witness))
        removed = set(taken)
        remaining = [i for i in remaining if i not in removed]

    residual_pts = [points[i] for i in remaining]
    if degree > 1:
        # record the degrees below the last extraction as well
        lower = check_property_nabla(residual_pts, multiplier, degree - 1, budget)
        check = NablaCheck(multiplier, cap, lower.rows + check.rows)
    residual_check = check
    d, ledger = partition_ledger(mode, parts, residual_pts, budget)
    counts: Dict[int, int] = {}
    for part in parts:
        counts[part.degree] = counts.get(part.degree, 0) + 1

    certificate = PartitionCertificate(
        mode=mode,
        points=points,
        parts=tuple(parts),
        residual=tuple(remaining),
        residual_degree=d,
        residual_check=residual_check,
        ledger=ledger,
        counts=counts,
    )
    certificate.verify()
    return certificate


__all__ = [
    "search_budget",
    "pin_down_count",
    "CurveMax",
    "max_points_on_curve",
    "IncidenceProfile",
    "incidence_profile",
    "NablaPreset",
    "CY_DOUBLE_SOLID",
    "CY_QUINTIC",
    "PRESETS",
    "NablaRow",
    "NablaCheck",
    "check_property_nabla",
    "LedgerRow",
    "ledger_status",
    "BeseLedger",
    "theorem_size_bound",
    "corollary_size_bound",
    "curve_bound",
    "bese_conditions",
    "Part",
    "PartitionCertificate",
    "partition_ledger",
    "partition",
]
