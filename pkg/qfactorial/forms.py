"""Sparse homogeneous polynomials with exact coefficients."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from qfactorial.core.errors import (
    DegreeMismatchError,
    DimensionMismatchError,
    FieldMismatchError,
    FormSyntaxError,
    InhomogeneousFormError,
    NotSingularError,
)
from qfactorial.exactalg import RATIONALS, Field, Matrix, Scalar, ensure_same_field, rank

Monomial = Tuple[int, ...]

# Letters used for the coordinates of P^3, P^4 and the double-cover variable.
VARIABLE_ALIASES: Dict[str, int] = {"x": 0, "y": 1, "z": 2, "t": 3, "w": 4, "u": 5}


@lru_cache(maxsize=512)
def _basis(num_vars: int, degree: int) -> Tuple[Monomial, ...]:
    if num_vars == 1:
        return ((degree,),)
    out: List[Monomial] = []
    for lead in range(degree, -1, -1):
        for rest in _basis(num_vars - 1, degree - lead):
            out.append((lead,) + rest)
    return tuple(out)


def monomial_basis(num_vars: int, degree: int) -> List[Monomial]:
    """All monomials of exact ``degree``, graded-lex (x0^d first)."""
    if num_vars < 1:
        raise DimensionMismatchError("a form needs at least one variable")
    if degree < 0:
        raise DegreeMismatchError(f"negative degree {degree}")
    return list(_basis(num_vars, degree))


def evaluate_monomial(monomial: Monomial, pt: Sequence[Scalar], field: Field = RATIONALS) -> Scalar:
    value: Scalar = 1
    for coordinate, exponent in zip(pt, monomial):
        if exponent:
            value = field.mul(value, field.power(coordinate, exponent))
            if value == 0:
                return 0
    return value


@dataclass(frozen=True)
class Form:
    """Homogeneous form; ``terms`` is sorted graded-lex and holds no zeros."""

    num_vars: int
    degree: int
    terms: Tuple[Tuple[Monomial, Scalar], ...]
    field: Field = RATIONALS

    @classmethod
    def from_terms(
        cls,
        num_vars: int,
        terms: Mapping[Monomial, Union[int, Fraction]],
        field: Field = RATIONALS,
        degree: Optional[int] = None,
    ) -> "Form":
        cleaned: Dict[Monomial, Scalar] = {}
        for monomial, coefficient in terms.items():
            if len(monomial) != num_vars:
                raise DimensionMismatchError(
                    f"monomial {monomial} does not have {num_vars} exponents"
                )
            value = field.coerce(coefficient)
            if value == 0:
                continue
            term_degree = sum(monomial)
            if degree is None:
                degree = term_degree
            elif term_degree != degree:
                raise InhomogeneousFormError(degree, term_degree)
            cleaned[monomial] = value
        if degree is None:
            degree = 0
        ordered = tuple(sorted(cleaned.items(), reverse=True))
        return cls(num_vars, degree, ordered, field)

    @classmethod
    def zero(cls, num_vars: int, degree: int = 0, field: Field = RATIONALS) -> "Form":
        return cls(num_vars, degree, (), field)

    @classmethod
    def constant(cls, value: Union[int, Fraction], num_vars: int, field: Field = RATIONALS) -> "Form":
        return cls.from_terms(num_vars, {(0,) * num_vars: value}, field, degree=0)

    @classmethod
    def variable(cls, index: int, num_vars: int, field: Field = RATIONALS) -> "Form":
        if not 0 <= index < num_vars:
            raise DimensionMismatchError(f"variable x{index} out of range for {num_vars} variables")
        exponents = tuple(1 if i == index else 0 for i in range(num_vars))
        return cls.from_terms(num_vars, {exponents: 1}, field, degree=1)

    @classmethod
    def linear(cls, coefficients: Sequence[Union[int, Fraction]], field: Field = RATIONALS) -> "Form":
        num_vars = len(coefficients)
        terms = {
            tuple(1 if i == j else 0 for i in range(num_vars)): c for j, c in enumerate(coefficients)
        }
        return cls.from_terms(num_vars, terms, field, degree=1)

    @classmethod
    def from_coefficients(
        cls,
        basis: Sequence[Monomial],
        vector: Sequence[Scalar],
        num_vars: int,
        degree: int,
        field: Field = RATIONALS,
    ) -> "Form":
        if len(basis) != len(vector):
            raise DimensionMismatchError("coefficient vector does not match the monomial basis")
        return cls.from_terms(num_vars, dict(zip(basis, vector)), field, degree=degree)

    # ------------------------------------------------------------------
    @property
    def coefficients(self) -> Dict[Monomial, Scalar]:
        return dict(self.terms)

    def coefficient(self, monomial: Monomial) -> Scalar:
        return self.coefficients.get(monomial, 0)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient_vector(self, basis: Sequence[Monomial]) -> Tuple[Scalar, ...]:
        lookup = self.coefficients
        return tuple(lookup.get(monomial, 0) for monomial in basis)

    def _check_compatible(self, other: "Form") -> None:
        ensure_same_field(self.field, other.field)
        if self.num_vars != other.num_vars:
            raise DimensionMismatchError(
                f"forms in {self.num_vars} and {other.num_vars} variables cannot be combined"
            )

    def __add__(self, other: "Form") -> "Form":
        self._check_compatible(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.degree != other.degree:
            raise InhomogeneousFormError(self.degree, other.degree)
        f = self.field
        merged = self.coefficients
        for monomial, value in other.terms:
            merged[monomial] = f.add(merged.get(monomial, 0), value)
        return Form.from_terms(self.num_vars, merged, f, degree=self.degree)

    def __neg__(self) -> "Form":
        return Form(self.num_vars, self.degree, tuple((m, self.field.neg(c)) for m, c in self.terms), self.field)

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __mul__(self, other: Union["Form", int, Fraction]) -> "Form":
        if not isinstance(other, Form):
            return self.scale(other)
        self._check_compatible(other)
        f = self.field
        degree = self.degree + other.degree
        product: Dict[Monomial, Scalar] = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                key = tuple(a + b for a, b in zip(m1, m2))
                product[key] = f.add(product.get(key, 0), f.mul(c1, c2))
        return Form.from_terms(self.num_vars, product, f, degree=degree)

    __rmul__ = __mul__

    def scale(self, factor: Union[int, Fraction]) -> "Form":
        value = self.field.coerce(factor)
        if value == 0:
            return Form.zero(self.num_vars, self.degree, self.field)
        return Form(
            self.num_vars,
            self.degree,
            tuple((m, self.field.mul(c, value)) for m, c in self.terms),
            self.field,
        )

    def __pow__(self, exponent: int) -> "Form":
        if exponent < 0:
            raise DegreeMismatchError("negative powers are not forms")
        result = Form.constant(1, self.num_vars, self.field)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __str__(self) -> str:
        return format_form(self)


# ----------------------------------------------------------------------
# Printing and parsing
# ----------------------------------------------------------------------
def _format_scalar(value: Scalar) -> str:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return str(value)


def format_form(f: Form) -> str:
    """Canonical text of ``f``; re-parses to the same form."""
    if f.is_zero():
        return "0"
    pieces: List[str] = []
    for index, (monomial, coefficient) in enumerate(f.terms):
        negative = coefficient < 0 if f.field.is_rational else False
        magnitude = -coefficient if negative else coefficient
        factors = [
            f"x{i}" if e == 1 else f"x{i}^{e}" for i, e in enumerate(monomial) if e
        ]
        if magnitude == 1 and factors:
            body = "*".join(factors)
        else:
            body = "*".join([_format_scalar(magnitude)] + factors)
        if index == 0:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f"- {body}" if negative else f"+ {body}")
    return " ".join(pieces)


_Expansion = Dict[Monomial, Scalar]

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z]+\d*)|(?P<op>[-+*^/()]))")


class _Parser:
    def __init__(self, text: str, num_vars: int, field: Field) -> None:
        self.text = text
        self.num_vars = num_vars
        self.field = field
        self.tokens: List[Tuple[str, str, int]] = []
        position = 0
        while position < len(text):
            if text[position:].strip() == "":
                break
            match = _TOKEN.match(text, position)
            if not match or match.end() == position:
                offset = position + (len(text[position:]) - len(text[position:].lstrip()))
                raise FormSyntaxError(f"unexpected character {text[offset]!r}", offset)
            kind = match.lastgroup or ""
            start = match.start(kind)
            self.tokens.append((kind, match.group(kind), start))
            position = match.end()
        self.index = 0

    def _peek(self) -> Optional[Tuple[str, str, int]]:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def _position(self) -> int:
        token = self._peek()
        return token[2] if token else len(self.text)

    def _accept(self, op: str) -> bool:
        token = self._peek()
        if token and token[0] == "op" and token[1] == op:
            self.index += 1
            return True
        return False

    def _expect_number(self) -> int:
        token = self._peek()
        if not token or token[0] != "num":
            raise FormSyntaxError("expected an integer", self._position())
        self.index += 1
        return int(token[1])

    def parse(self) -> Form:
        if not self.tokens:
            raise FormSyntaxError("empty expression", 0)
        raw = self._expr()
        if self._peek() is not None:
            raise FormSyntaxError(f"unexpected token {self._peek()[1]!r}", self._position())  # type: ignore[index]
        # homogeneity is judged on the expanded sum; an all-cancelled sum keeps its top degree
        live = [monomial for monomial, value in raw.items() if value != 0]
        degree = sum(live[0]) if live else max(sum(monomial) for monomial in raw)
        return Form.from_terms(self.num_vars, raw, self.field, degree=degree)

    # Sub-expressions stay plain monomial maps until the whole text is read.
    def _plus(self, a: _Expansion, b: _Expansion, sign: int = 1) -> _Expansion:
        f = self.field
        out = dict(a)
        for monomial, value in b.items():
            out[monomial] = f.add(out.get(monomial, 0), value if sign > 0 else f.neg(value))
        return out

    def _times(self, a: _Expansion, b: _Expansion) -> _Expansion:
        f = self.field
        out: _Expansion = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                key = tuple(x + y for x, y in zip(m1, m2))
                out[key] = f.add(out.get(key, 0), f.mul(c1, c2))
        return out

    def _constant(self, value: Union[int, Fraction]) -> _Expansion:
        return {(0,) * self.num_vars: self.field.coerce(value)}

    def _expr(self) -> _Expansion:
        result = self._term()
        while True:
            if self._accept("+"):
                result = self._plus(result, self._term())
            elif self._accept("-"):
                result = self._plus(result, self._term(), -1)
            else:
                return result

    def _term(self) -> _Expansion:
        negate = False
        if self._accept("-"):
            negate = True
        else:
            self._accept("+")
        result = self._factor()
        while self._accept("*"):
            result = self._times(result, self._factor())
        return self._plus({}, result, -1) if negate else result

    def _factor(self) -> _Expansion:
        base = self._base()
        if self._accept("^"):
            power = self._constant(1)
            for _ in range(self._expect_number()):
                power = self._times(power, base)
            return power
        return base

    def _base(self) -> _Expansion:
        token = self._peek()
        if token is None:
            raise FormSyntaxError("unexpected end of expression", len(self.text))
        kind, value, position = token
        if kind == "num":
            self.index += 1
            numerator = int(value)
            if self._accept("/"):
                denominator = self._expect_number()
                if denominator == 0:
                    raise FormSyntaxError("zero denominator", position)
                return self._constant(Fraction(numerator, denominator))
            return self._constant(numerator)
        if kind == "name":
            self.index += 1
            index = self._variable_index(value, position)
            return {tuple(int(i == index) for i in range(self.num_vars)): self.field.coerce(1)}
        if self._accept("("):
            inner = self._expr()
            if not self._accept(")"):
                raise FormSyntaxError("expected ')'", self._position())
            return inner
        raise FormSyntaxError(f"unexpected token {value!r}", position)

    def _variable_index(self, name: str, position: int) -> int:
        lowered = name.lower()
        if re.fullmatch(r"x\d+", lowered):
            index = int(lowered[1:])
        elif lowered in VARIABLE_ALIASES:
            index = VARIABLE_ALIASES[lowered]
        else:
            raise FormSyntaxError(f"unknown variable {name!r}", position)
        if index >= self.num_vars:
            raise FormSyntaxError(f"variable {name!r} out of range for {self.num_vars} variables", position)
        return index


def parse_form(text: str, num_vars: int, field: Field = RATIONALS) -> Form:
    """Parse an expression in ``x0..x_m`` (or x, y, z, t, w, u) into a Form."""
    return _Parser(text, num_vars, field).parse()


# ----------------------------------------------------------------------
# Evaluation and derivatives
# ----------------------------------------------------------------------
def evaluate(f: Form, pt: Sequence[Union[int, Fraction]]) -> Scalar:
    if len(pt) != f.num_vars:
        raise DimensionMismatchError(f"point has {len(pt)} coordinates, form has {f.num_vars} variables")
    field = f.field
    coords = [field.coerce(c) for c in pt]
    total: Scalar = 0
    for monomial, coefficient in f.terms:
        value = evaluate_monomial(monomial, coords, field)
        if value:
            total = field.add(total, field.mul(coefficient, value))
    return total


def derivative(f: Form, index: int) -> Form:
    if f.degree < 1:
        raise DegreeMismatchError("constants have no gradient")
    field = f.field
    out: Dict[Monomial, Scalar] = {}
    for monomial, coefficient in f.terms:
        exponent = monomial[index]
        if exponent:
            lowered = monomial[:index] + (exponent - 1,) + monomial[index + 1 :]
            out[lowered] = field.mul(coefficient, field.coerce(exponent))
    return Form.from_terms(f.num_vars, out, field, degree=f.degree - 1)


def gradient(f: Form) -> List[Form]:
    """Partial derivatives, one per variable."""
    return [derivative(f, i) for i in range(f.num_vars)]


def hessian_matrix(f: Form) -> List[List[Form]]:
    if f.degree < 2:
        zero = Form.zero(f.num_vars, 0, f.field)
        return [[zero] * f.num_vars for _ in range(f.num_vars)]
    first = gradient(f)
    return [[derivative(first[i], j) for j in range(f.num_vars)] for i in range(f.num_vars)]


def is_singular_at(f: Form, pt: Sequence[Union[int, Fraction]]) -> bool:
    if f.degree < 1:
        return False
    return all(evaluate(partial, pt) == 0 for partial in gradient(f))


def default_chart(pt: Sequence[Union[int, Fraction]]) -> int:
    """Largest index of a nonzero coordinate."""
    for index in range(len(pt) - 1, -1, -1):
        if pt[index] != 0:
            return index
    raise DimensionMismatchError("the zero vector is not a projective point")


def hessian_rank_at(f: Form, pt: Sequence[Union[int, Fraction]], chart: Optional[int] = None) -> int:
    """Rank of the affine Hessian of ``f`` at the singular point ``pt``.

    In the chart ``x_c = 1`` the affine Hessian is the full matrix of second
    partials with row and column ``c`` removed.
    """
    if len(pt) != f.num_vars:
        raise DimensionMismatchError(f"point has {len(pt)} coordinates, form has {f.num_vars} variables")
    if not is_singular_at(f, pt):
        raise NotSingularError(f"the form does not vanish to order two at {tuple(pt)}")
    c = default_chart(pt) if chart is None else chart
    if pt[c] == 0:
        raise DimensionMismatchError(f"coordinate {c} of {tuple(pt)} is zero; not a valid chart")

    second = hessian_matrix(f)
    keep = [i for i in range(f.num_vars) if i != c]
    rows = [[evaluate(second[i][j], pt) for j in keep] for i in keep]
    return rank(Matrix.from_rows(rows, f.field, cols=len(keep)))


@dataclass(frozen=True)
class PointClass:
    kind: str
    hessian_rank: Optional[int] = None

    @property
    def is_node(self) -> bool:
        return self.kind == "node"


def classify_point(f: Form, pt: Sequence[Union[int, Fraction]]) -> PointClass:
    """``node`` (full-rank Hessian), ``degenerate`` or ``not_singular``."""
    if not is_singular_at(f, pt):
        return PointClass("not_singular")
    value = hessian_rank_at(f, pt)
    if value == f.num_vars - 1:
        return PointClass("node", value)
    return PointClass("degenerate", value)


# ----------------------------------------------------------------------
# Substitution and reduction
# ----------------------------------------------------------------------
def substitute(f: Form, images: Sequence[Form]) -> Form:
    """Compose ``f`` with the ring map ``x_i -> images[i]``."""
    if len(images) != f.num_vars:
        raise DimensionMismatchError(f"{len(images)} images for {f.num_vars} variables")
    target_vars = images[0].num_vars
    image_degree = max((image.degree for image in images if not image.is_zero()), default=images[0].degree)
    for image in images:
        ensure_same_field(f.field, image.field)
        if image.num_vars != target_vars:
            raise DimensionMismatchError("substitution images live in different rings")
        if not image.is_zero() and image.degree != image_degree:
            raise InhomogeneousFormError(image_degree, image.degree)

    result = Form.zero(target_vars, f.degree * image_degree, f.field)
    powers: Dict[Tuple[int, int], Form] = {}
    for monomial, coefficient in f.terms:
        term = Form.constant(coefficient, target_vars, f.field)
        for index, exponent in enumerate(monomial):
            if exponent:
                key = (index, exponent)
                if key not in powers:
                    powers[key] = images[index] ** exponent
                term = term * powers[key]
        result = result + term
    if result.is_zero():
        return Form.zero(target_vars, f.degree * image_degree, f.field)
    return result


def reduce_mod(f: Form, p: int) -> Form:
    if not f.field.is_rational:
        raise FieldMismatchError("only rational forms can be reduced modulo a prime")
    target = Field.prime(p)
    return Form.from_terms(f.num_vars, f.coefficients, target, degree=f.degree)


def product(forms: Iterable[Form], num_vars: int, field: Field = RATIONALS) -> Form:
    result = Form.constant(1, num_vars, field)
    for form in forms:
        result = result * form
    return result


__all__ = [
    "Monomial",
    "Form",
    "PointClass",
    "VARIABLE_ALIASES",
    "monomial_basis",
    "evaluate_monomial",
    "format_form",
    "parse_form",
    "evaluate",
    "derivative",
    "gradient",
    "hessian_matrix",
    "is_singular_at",
    "default_chart",
    "hessian_rank_at",
    "classify_point",
    "substitute",
    "reduce_mod",
    "product",
]
