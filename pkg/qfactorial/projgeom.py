"""Projective points, linear projections to the plane, and cones over plane curves."""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from qfactorial.core.errors import DimensionMismatchError, InputError, PointOnCenterError
from qfactorial.core.resilience import RetryPolicy, retry_with_growth
from qfactorial.exactalg import RATIONALS, Field, Matrix, kernel_basis, rank
from qfactorial.forms import Form, evaluate, substitute

logger = logging.getLogger(__name__)


def normalize(values: Sequence[Union[int, Fraction]], field: Field = RATIONALS) -> Tuple[int, ...]:
    """Canonical integer representative of a projective point.

    Over Q: denominators cleared, gcd 1, first nonzero entry positive.
    Over F_p: residues in [0, p) with first nonzero entry 1.
    """
    if field.is_rational:
        fractions = [Fraction(v) for v in values]
        scale = math.lcm(*(fr.denominator for fr in fractions)) if fractions else 1
        integers = [int(fr * scale) for fr in fractions]
        common = math.gcd(*integers) if integers else 0
        if common == 0:
            raise InputError("the zero vector is not a projective point")
        lead = next(v for v in integers if v != 0)
        sign = 1 if lead > 0 else -1
        return tuple(sign * v // common for v in integers)

    residues = [field.coerce(v) for v in values]
    lead = next((v for v in residues if v != 0), None)
    if lead is None:
        raise InputError("the zero vector is not a projective point")
    inverse = field.inv(lead)
    return tuple(int(field.mul(v, inverse)) for v in residues)


@dataclass(frozen=True, order=True)
class ProjPoint:
    coords: Tuple[int, ...]

    @classmethod
    def of(cls, values: Sequence[Union[int, Fraction]], field: Field = RATIONALS) -> "ProjPoint":
        return cls(normalize(values, field))

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def __iter__(self) -> Iterator[int]:
        return iter(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __getitem__(self, index: int) -> int:
        return self.coords[index]

    def __str__(self) -> str:
        return "[" + ":".join(str(c) for c in self.coords) + "]"


def _integer_vector(vector: Sequence[Union[int, Fraction]]) -> List[int]:
    fractions = [Fraction(v) for v in vector]
    scale = math.lcm(*(fr.denominator for fr in fractions))
    integers = [int(fr * scale) for fr in fractions]
    common = math.gcd(*integers) or 1
    return [v // common for v in integers]


@dataclass(frozen=True)
class Projection:
    """Linear projection P^m -> P^2 from a center of dimension m - 3."""

    source_dim: int
    center: Tuple[ProjPoint, ...]
    forms: Tuple[Form, Form, Form]
    field: Field = RATIONALS

    def __post_init__(self) -> None:
        if len(self.forms) != 3:
            raise DimensionMismatchError("a projection to P^2 needs exactly three linear forms")
        rows = [form.coefficient_vector(_linear_basis(self.source_dim + 1)) for form in self.forms]
        if rank(Matrix.from_rows(rows, self.field, cols=self.source_dim + 1)) != 3:
            raise InputError("projection forms are linearly dependent")
        for point in self.center:
            if any(evaluate(form, point.coords) != 0 for form in self.forms):
                raise InputError(f"projection form does not vanish on center point {point}")

    @classmethod
    def from_center(cls, center: Sequence[ProjPoint], field: Field = RATIONALS) -> "Projection":
        """Projection whose forms span the linear forms vanishing on ``center``."""
        if not center:
            raise DimensionMismatchError("empty projection center")
        num_vars = len(center[0])
        if any(len(point) != num_vars for point in center):
            raise DimensionMismatchError("center points live in different spaces")
        m = Matrix.from_rows([list(point.coords) for point in center], field, cols=num_vars)
        basis = kernel_basis(m)
        if len(basis) != 3:
            raise InputError(f"center spans the wrong dimension: {len(basis)} independent forms vanish on it")
        if field.is_rational:
            vectors = [_integer_vector(vector) for vector in basis]
        else:
            vectors = [list(vector) for vector in basis]
        forms = tuple(Form.linear(vector, field) for vector in vectors)
        return cls(num_vars - 1, tuple(center), forms, field)  # type: ignore[arg-type]

    def image(self, point: ProjPoint) -> ProjPoint:
        values = [evaluate(form, point.coords) for form in self.forms]
        if all(v == 0 for v in values):
            raise PointOnCenterError(point)
        return ProjPoint.of(values, self.field)


def _linear_basis(num_vars: int) -> List[Tuple[int, ...]]:
    return [tuple(1 if i == j else 0 for i in range(num_vars)) for j in range(num_vars)]


@dataclass(frozen=True)
class ProjectionResult:
    images: Tuple[ProjPoint, ...]
    injective: bool


def project(proj: Projection, pts: Sequence[ProjPoint]) -> ProjectionResult:
    """Images of ``pts`` in input order, plus whether the map is injective on them."""
    images = []
    for point in pts:
        if len(point) != proj.source_dim + 1:
            raise DimensionMismatchError(f"point {point} is not in P^{proj.source_dim}")
        images.append(proj.image(point))
    return ProjectionResult(tuple(images), len(set(images)) == len(set(pts)))


def random_projection(
    source_dim: int,
    pts: Sequence[ProjPoint],
    seed: int,
    policy: Optional[RetryPolicy] = None,
    field: Field = RATIONALS,
) -> Projection:
    """Seeded rejection sampling of a center that keeps ``pts`` apart.

    The center is a point (P^3) or a line spanned by two points (P^4).
    An attempt is accepted when the center has full dimension, misses every
    input point, and the induced map is injective on the distinct inputs.
    """
    if source_dim not in (3, 4):
        raise DimensionMismatchError("projections are defined from P^3 or P^4")
    if not pts:
        raise InputError("random_projection needs at least one point")
    for point in pts:
        if len(point) != source_dim + 1:
            raise DimensionMismatchError(f"point {point} is not in P^{source_dim}")

    policy = policy or RetryPolicy()
    rng = random.Random(seed)
    distinct = list(dict.fromkeys(pts))
    center_size = source_dim - 2

    def attempt(number: int, bound: int) -> Optional[Projection]:
        rows = [[rng.randint(-bound, bound) for _ in range(source_dim + 1)] for _ in range(center_size)]
        if rank(Matrix.from_rows(rows, field, cols=source_dim + 1)) != center_size:
            return None
        center = [ProjPoint.of(row, field) for row in rows]
        candidate = Projection.from_center(center, field)
        try:
            images = project(candidate, distinct)
        except PointOnCenterError as exc:
            logger.debug("center %s contains input point %s", [str(c) for c in center], exc.point)
            return None
        if not images.injective:
            return None
        return candidate

    projection = retry_with_growth(attempt, policy, label=f"projection from P^{source_dim}")
    logger.info("projection accepted with center %s", ", ".join(str(c) for c in projection.center))
    return projection


def cone_pullback(curve: Form, proj: Projection) -> Form:
    """The cone over ``curve`` with vertex the projection center."""
    if curve.num_vars != 3:
        raise DimensionMismatchError("cone_pullback expects a plane curve in three variables")
    return substitute(curve, list(proj.forms))


__all__ = [
    "normalize",
    "ProjPoint",
    "Projection",
    "ProjectionResult",
    "project",
    "random_projection",
    "cone_pullback",
]
