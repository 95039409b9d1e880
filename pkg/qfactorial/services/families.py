"""Example families, node enumeration over prime fields, and node-count bounds."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from qfactorial.core.errors import DegreeMismatchError, DimensionMismatchError, InputError
from qfactorial.core.resilience import SearchBudget
from qfactorial.exactalg import Field
from qfactorial.forms import Form, PointClass, classify_point, gradient, monomial_basis, product, reduce_mod
from qfactorial.projgeom import ProjPoint
from qfactorial.services.modes import DOUBLE_SOLID, HYPERSURFACE, Mode
from qfactorial.services.scan import common_zeros

logger = logging.getLogger(__name__)

EXAMPLE_I = "example_I"
EXAMPLE_II = "example_II"
FOURFOLD = "fourfold"

RATIONALITY_CAVEAT = "only nodes with coordinates in F_p are found"


@dataclass(frozen=True)
class FamilyInstance:
    """Defining data of one member of an example family.

    ``equation`` is the hypersurface that gets scanned: the branch surface
    g^2 + h*f in P^3 for the double solid, x0*g + x1*f in P^4, or the octic
    sum of f_i*g_i^2 for the fourfold double cover.
    """

    kind: str
    param: Optional[int]
    components: Tuple[Tuple[str, Form], ...]
    equation: Form

    @property
    def ambient_dim(self) -> int:
        return self.equation.num_vars - 1

    @property
    def field(self) -> Field:
        return self.equation.field

    @property
    def mode(self) -> Optional[Mode]:
        if self.kind == EXAMPLE_I:
            return Mode.double_solid(self.param)  # type: ignore[arg-type]
        if self.kind == EXAMPLE_II:
            return Mode.hypersurface(self.param)  # type: ignore[arg-type]
        return None

    @property
    def expected_nodes(self) -> Optional[int]:
        """(2r - 1) r for the double solid, (n - 1)^2 for the hypersurface."""
        if self.kind == EXAMPLE_I:
            return (2 * self.param - 1) * self.param  # type: ignore[operator]
        if self.kind == EXAMPLE_II:
            return (self.param - 1) ** 2  # type: ignore[operator]
        return None

    def component(self, name: str) -> Form:
        return dict(self.components)[name]


def _require(form: Form, name: str, num_vars: int, degree: int) -> None:
    if form.num_vars != num_vars:
        raise DimensionMismatchError(f"{name} must be a form in {num_vars} variables")
    if form.degree != degree:
        raise DegreeMismatchError(f"{name} must have degree {degree}, got {form.degree}")


def make_example_I(r: int, g: Form, h: Form, f: Form) -> FamilyInstance:
    """Double solid u^2 = g^2 + h*f, with deg g = r, deg h = 1, deg f = 2r - 1."""
    if r < 1:
        raise InputError("r must be at least 1")
    _require(g, "g", 4, r)
    _require(h, "h", 4, 1)
    _require(f, "f", 4, 2 * r - 1)
    return FamilyInstance(EXAMPLE_I, r, (("g", g), ("h", h), ("f", f)), g * g + h * f)


def make_example_II(n: int, g: Form, f: Form) -> FamilyInstance:
    """Hypersurface x0*g + x1*f in P^4, with deg g = deg f = n - 1."""
    if n < 2:
        raise InputError("n must be at least 2")
    _require(g, "g", 5, n - 1)
    _require(f, "f", 5, n - 1)
    x0 = Form.variable(0, 5, g.field)
    x1 = Form.variable(1, 5, g.field)
    return FamilyInstance(EXAMPLE_II, n, (("g", g), ("f", f)), x0 * g + x1 * f)


def make_fourfold(pairs: Sequence[Tuple[Form, Form]]) -> FamilyInstance:
    """Octic branch divisor sum of f_i * g_i^2 with deg f_i + 2 deg g_i = 8."""
    if len(pairs) != 3:
        raise InputError("the fourfold recipe takes exactly three (f, g) pairs")
    components: List[Tuple[str, Form]] = []
    equation: Optional[Form] = None
    for index, (f, g) in enumerate(pairs, start=1):
        if f.num_vars != 5 or g.num_vars != 5:
            raise DimensionMismatchError("fourfold forms live in five variables")
        if f.degree < 1 or g.degree < 1:
            raise DegreeMismatchError("fourfold forms must be non-constant")
        if f.degree + 2 * g.degree != 8:
            raise DegreeMismatchError(f"deg f{index} + 2 deg g{index} must be 8")
        components += [(f"f{index}", f), (f"g{index}", g)]
        term = f * g * g
        equation = term if equation is None else equation + term
    return FamilyInstance(FOURFOLD, None, tuple(components), equation)  # type: ignore[arg-type]


def _linear_product(num_vars: int, index: int, anchor: int, count: int) -> Form:
    """Product of x_index - a*x_anchor for a = 1..count."""
    factors = [
        Form.variable(index, num_vars) - Form.variable(anchor, num_vars).scale(a) for a in range(1, count + 1)
    ]
    return product(factors, num_vars)


def split_example_I(r: int) -> FamilyInstance:
    """Rational member whose (2r - 1) r nodes are [0:a:b:1], 1 <= a <= r, 1 <= b <= 2r - 1."""
    x0 = Form.variable(0, 4)
    g = _linear_product(4, 1, 3, r)
    f = _linear_product(4, 2, 3, 2 * r - 1) + x0 ** (2 * r - 1)
    return make_example_I(r, g, x0, f)


def split_example_II(n: int) -> FamilyInstance:
    """Rational member whose (n - 1)^2 nodes are [0:0:a:b:1], 1 <= a, b <= n - 1."""
    g = _linear_product(5, 2, 4, n - 1) + Form.variable(0, 5) ** (n - 1)
    f = _linear_product(5, 3, 4, n - 1) + Form.variable(1, 5) ** (n - 1)
    return make_example_II(n, g, f)


def random_form(num_vars: int, degree: int, rng: random.Random, bound: int = 5) -> Form:
    basis = monomial_basis(num_vars, degree)
    while True:
        values = [rng.randint(-bound, bound) for _ in basis]
        if any(values):
            return Form.from_coefficients(basis, values, num_vars, degree)


def random_family(kind: str, param: Optional[int], seed: int, bound: int = 5) -> FamilyInstance:
    """Dense member with coefficients in [-bound, bound]; node counts are not predicted."""
    rng = random.Random(seed)
    if kind == EXAMPLE_I:
        if param is None:
            raise InputError("example_I needs r")
        return make_example_I(
            param, random_form(4, param, rng, bound), random_form(4, 1, rng, bound), random_form(4, 2 * param - 1, rng, bound)
        )
    if kind == EXAMPLE_II:
        if param is None:
            raise InputError("example_II needs n")
        return make_example_II(param, random_form(5, param - 1, rng, bound), random_form(5, param - 1, rng, bound))
    if kind == FOURFOLD:
        degrees = [(2, 3), (4, 2), (6, 1)]
        return make_fourfold([(random_form(5, a, rng, bound), random_form(5, b, rng, bound)) for a, b in degrees])
    raise InputError(f"unknown family {kind!r}")


# ----------------------------------------------------------------------
# Node enumeration
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class NodeList:
    prime: int
    points: Tuple[ProjPoint, ...]
    classes: Tuple[PointClass, ...]
    caveat: str = RATIONALITY_CAVEAT

    @property
    def nodes(self) -> Tuple[ProjPoint, ...]:
        return tuple(point for point, cls in zip(self.points, self.classes) if cls.is_node)

    def counts(self) -> Dict[str, int]:
        tally: Dict[str, int] = {}
        for cls in self.classes:
            tally[cls.kind] = tally.get(cls.kind, 0) + 1
        return tally


def find_nodes(
    instance: FamilyInstance,
    p: int,
    budget: Optional[SearchBudget] = None,
    workers: int = 1,
) -> NodeList:
    """Every F_p-rational singular point of the instance equation, classified."""
    equation = instance.equation
    if equation.field.is_rational:
        equation = reduce_mod(equation, p)
    elif equation.field.modulus != p:
        raise InputError(f"instance is defined over F_{equation.field.modulus}, not F_{p}")

    forms = [equation] + gradient(equation)
    singular = common_zeros(forms, equation.num_vars, p, budget, workers)
    points = tuple(ProjPoint.of(coords, Field.prime(p)) for coords in singular)
    classes = tuple(classify_point(equation, point.coords) for point in points)
    result = NodeList(p, points, classes)
    logger.info("F_%s scan of %s: %s", p, instance.kind, result.counts())
    return result


# ----------------------------------------------------------------------
# Bounds
# ----------------------------------------------------------------------
CY_DOUBLE_SOLID_BOUND = 25
CY_QUINTIC_BOUND = 14


def theorem_bound(kind: str, param: Optional[int] = None) -> Fraction:
    """Largest node count for which the node theorems guarantee Q-factoriality."""
    if kind == "cy_double_solid":
        return Fraction(CY_DOUBLE_SOLID_BOUND)
    if kind == "cy_quintic":
        return Fraction(CY_QUINTIC_BOUND)
    if kind not in (DOUBLE_SOLID, HYPERSURFACE):
        raise InputError(f"unknown bound kind {kind!r}")
    if param is None:
        raise InputError(f"{kind} bound needs a parameter")
    return Mode(kind, param).theorem_bound


def varchenko_bound(i: int, j: int) -> int:
    """Integer tuples in (0, j)^i whose sum lies in ((i - 2) j / 2 + 1, i j / 2]."""
    if i < 2 or j < 2:
        raise InputError("varchenko_bound needs i >= 2 and j >= 2")
    counts = {0: 1}
    for _ in range(i):
        step: Dict[int, int] = {}
        for total, ways in counts.items():
            for a in range(1, j):
                step[total + a] = step.get(total + a, 0) + ways
        counts = step
    lower = Fraction((i - 2) * j, 2) + 1
    upper = Fraction(i * j, 2)
    return sum(ways for total, ways in counts.items() if lower < total <= upper)


def max_nodes(mode: Mode) -> int:
    """Upper bound on the node count of any member: A_3(2r) or A_4(n)."""
    if mode.is_double_solid:
        return varchenko_bound(3, 2 * mode.param)
    return varchenko_bound(4, mode.param)


__all__ = [
    "EXAMPLE_I",
    "EXAMPLE_II",
    "FOURFOLD",
    "RATIONALITY_CAVEAT",
    "FamilyInstance",
    "make_example_I",
    "make_example_II",
    "make_fourfold",
    "split_example_I",
    "split_example_II",
    "random_form",
    "random_family",
    "NodeList",
    "find_nodes",
    "CY_DOUBLE_SOLID_BOUND",
    "CY_QUINTIC_BOUND",
    "theorem_bound",
    "varchenko_bound",
    "max_nodes",
]
