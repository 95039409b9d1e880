"""Exact field arithmetic and dense linear algebra over Q and prime fields.

Rational matrices are eliminated fraction-free (Bareiss) on integer rows, so
intermediate values stay integral; prime-field matrices use ordinary
elimination on residues. Pivots are always the first nonzero entry in column
order, which keeps every downstream certificate reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from sympy import isprime

from qfactorial.core.errors import DimensionMismatchError, FieldMismatchError, InputError

Scalar = Union[int, Fraction]
Vector = Tuple[Scalar, ...]


@lru_cache(maxsize=256)
def _is_prime(value: int) -> bool:
    return bool(isprime(value))


@dataclass(frozen=True)
class Field:
    """Field descriptor: the rationals (``modulus is None``) or F_p."""

    modulus: Optional[int] = None

    def __post_init__(self) -> None:
        if self.modulus is not None and (self.modulus < 2 or not _is_prime(self.modulus)):
            raise InputError(f"field modulus {self.modulus} is not prime")

    @classmethod
    def prime(cls, p: int) -> "Field":
        return cls(int(p))

    @property
    def is_rational(self) -> bool:
        return self.modulus is None

    def describe(self) -> str:
        return "rational" if self.modulus is None else f"prime {self.modulus}"

    # ------------------------------------------------------------------
    # Element arithmetic
    # ------------------------------------------------------------------
    def coerce(self, value: Union[int, Fraction, str]) -> Scalar:
        """Map an integer or rational into this field."""
        if isinstance(value, str):
            value = Fraction(value)
        if self.modulus is None:
            if isinstance(value, Fraction):
                return value.numerator if value.denominator == 1 else value
            return int(value)

        p = self.modulus
        if isinstance(value, Fraction):
            if value.denominator % p == 0:
                raise FieldMismatchError(f"{value} has no image in F_{p}")
            return value.numerator * pow(value.denominator, -1, p) % p
        return int(value) % p

    @property
    def zero(self) -> Scalar:
        return 0

    @property
    def one(self) -> Scalar:
        return 1

    def add(self, a: Scalar, b: Scalar) -> Scalar:
        if self.modulus is None:
            return _tidy(a + b)
        return (a + b) % self.modulus

    def sub(self, a: Scalar, b: Scalar) -> Scalar:
        if self.modulus is None:
            return _tidy(a - b)
        return (a - b) % self.modulus

    def mul(self, a: Scalar, b: Scalar) -> Scalar:
        if self.modulus is None:
            return _tidy(a * b)
        return (a * b) % self.modulus

    def neg(self, a: Scalar) -> Scalar:
        if self.modulus is None:
            return -a
        return (-a) % self.modulus

    def inv(self, a: Scalar) -> Scalar:
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero")
        if self.modulus is None:
            return _tidy(Fraction(1) / a)
        return pow(int(a), -1, self.modulus)

    def div(self, a: Scalar, b: Scalar) -> Scalar:
        return self.mul(a, self.inv(b))

    def power(self, a: Scalar, exponent: int) -> Scalar:
        if self.modulus is None:
            return _tidy(a**exponent)
        return pow(int(a), exponent, self.modulus)

    def is_zero(self, a: Scalar) -> bool:
        return a == 0


RATIONALS = Field()


def _tidy(value: Scalar) -> Scalar:
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    return value


def ensure_same_field(*fields: Field) -> Field:
    first = fields[0]
    for other in fields[1:]:
        if other != first:
            raise FieldMismatchError(f"mixed fields: {first.describe()} and {other.describe()}")
    return first


class SolveOutcome(Enum):
    INCONSISTENT = "inconsistent"


INCONSISTENT = SolveOutcome.INCONSISTENT


@dataclass(frozen=True)
class Matrix:
    """Dense row-major matrix over one field."""

    rows: int
    cols: int
    entries: Tuple[Scalar, ...]
    field: Field = RATIONALS

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise DimensionMismatchError("matrix dimensions must be non-negative")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatchError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(
        cls,
        rows: Sequence[Sequence[Union[int, Fraction]]],
        field: Field = RATIONALS,
        cols: Optional[int] = None,
    ) -> "Matrix":
        width = len(rows[0]) if rows else (cols or 0)
        if cols is not None and rows and width != cols:
            raise DimensionMismatchError(f"rows have {width} entries, expected {cols}")
        entries: List[Scalar] = []
        for row in rows:
            if len(row) != width:
                raise DimensionMismatchError("ragged rows")
            entries.extend(field.coerce(value) for value in row)
        return cls(len(rows), width, tuple(entries), field)

    def row(self, index: int) -> Vector:
        start = index * self.cols
        return self.entries[start : start + self.cols]

    def row_lists(self) -> List[List[Scalar]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "Matrix":
        entries = tuple(self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows))
        return Matrix(self.cols, self.rows, entries, self.field)

    def matvec(self, vector: Sequence[Scalar]) -> Vector:
        if len(vector) != self.cols:
            raise DimensionMismatchError(f"vector of length {len(vector)} against {self.cols} columns")
        f = self.field
        out: List[Scalar] = []
        for i in range(self.rows):
            acc: Scalar = 0
            for a, b in zip(self.row(i), vector):
                if a and b:
                    acc = f.add(acc, f.mul(a, b))
            out.append(acc)
        return tuple(out)

    def select_rows(self, indices: Iterable[int]) -> "Matrix":
        picked = [self.row(i) for i in indices]
        entries = tuple(value for row in picked for value in row)
        return Matrix(len(picked), self.cols, entries, self.field)

    def reduce_mod(self, p: int) -> "Matrix":
        if not self.field.is_rational:
            raise FieldMismatchError("only rational matrices can be reduced modulo a prime")
        target = Field.prime(p)
        return Matrix(self.rows, self.cols, tuple(target.coerce(v) for v in self.entries), target)


# ----------------------------------------------------------------------
# Elimination kernels
# ----------------------------------------------------------------------
def _integer_row(row: Sequence[Scalar]) -> List[int]:
    denominators = [v.denominator for v in row if isinstance(v, Fraction)]
    scale = math.lcm(*denominators) if denominators else 1
    return [int(v * scale) for v in row]


def _bareiss(rows: List[List[int]], ncols: int, pivot_limit: int) -> Tuple[List[List[int]], List[int]]:
    """Fraction-free forward elimination; pivots only in columns < pivot_limit."""
    nrows = len(rows)
    pivots: List[int] = []
    previous = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        pivot_row = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if pivot_row is None:
            continue
        if c >= pivot_limit:
            pivots.append(c)
            r += 1
            break
        if pivot_row != r:
            rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        top = rows[r]
        pivot = top[c]
        for i in range(r + 1, nrows):
            current = rows[i]
            factor = current[c]
            for j in range(c + 1, ncols):
                current[j] = (pivot * current[j] - factor * top[j]) // previous
            current[c] = 0
        previous = pivot
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def _modular(rows: List[List[int]], ncols: int, pivot_limit: int, p: int) -> Tuple[List[List[int]], List[int]]:
    nrows = len(rows)
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        pivot_row = next((i for i in range(r, nrows) if rows[i][c] % p != 0), None)
        if pivot_row is None:
            continue
        if c >= pivot_limit:
            pivots.append(c)
            r += 1
            break
        if pivot_row != r:
            rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        top = rows[r]
        inverse = pow(top[c], -1, p)
        for j in range(c, ncols):
            top[j] = top[j] * inverse % p
        for i in range(r + 1, nrows):
            current = rows[i]
            factor = current[c] % p
            if factor:
                for j in range(c, ncols):
                    current[j] = (current[j] - factor * top[j]) % p
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def _echelon(
    m: Matrix, rhs: Optional[Sequence[Scalar]] = None
) -> Tuple[List[List[int]], List[int], int]:
    """Echelon form of ``m`` (optionally augmented by ``rhs``) as integer rows."""
    width = m.cols + (1 if rhs is not None else 0)
    raw_rows: List[List[Scalar]] = []
    for i in range(m.rows):
        row = list(m.row(i))
        if rhs is not None:
            row.append(m.field.coerce(rhs[i]))
        raw_rows.append(row)

    if m.field.is_rational:
        rows = [_integer_row(row) for row in raw_rows]
        echelon, pivots = _bareiss(rows, width, m.cols)
    else:
        rows = [[int(v) for v in row] for row in raw_rows]
        echelon, pivots = _modular(rows, width, m.cols, m.field.modulus)  # type: ignore[arg-type]
    return echelon, pivots, width


def _back_substitute(
    echelon: List[List[int]],
    pivots: Sequence[int],
    field: Field,
    cols: int,
    fixed: dict[int, Scalar],
    rhs_column: Optional[int] = None,
) -> List[Scalar]:
    solution: List[Scalar] = [0] * cols
    for column, value in fixed.items():
        solution[column] = value
    for r in range(len(pivots) - 1, -1, -1):
        c = pivots[r]
        row = echelon[r]
        acc: Scalar = field.coerce(row[rhs_column]) if rhs_column is not None else 0
        for j in range(c + 1, cols):
            if row[j] and solution[j]:
                acc = field.sub(acc, field.mul(field.coerce(row[j]), solution[j]))
        solution[c] = field.div(acc, field.coerce(row[c]))
    return solution


def _normalize_leading(vector: Sequence[Scalar], field: Field) -> Vector:
    lead = next((v for v in vector if not field.is_zero(v)), None)
    if lead is None:
        return tuple(vector)
    inverse = field.inv(lead)
    return tuple(field.mul(v, inverse) for v in vector)


def rank(m: Matrix) -> int:
    """Exact rank of ``m``."""
    if m.rows == 0 or m.cols == 0:
        return 0
    _, pivots, _ = _echelon(m)
    return len(pivots)


def kernel_basis(m: Matrix) -> List[Vector]:
    """Basis of the right null space, each vector with leading entry 1."""
    if m.cols == 0:
        return []
    if m.rows == 0:
        return [tuple(1 if i == j else 0 for i in range(m.cols)) for j in range(m.cols)]

    echelon, pivots, _ = _echelon(m)
    pivot_set = set(pivots)
    basis: List[Vector] = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        fixed = {j: 0 for j in range(m.cols) if j not in pivot_set}
        fixed[free] = 1
        vector = _back_substitute(echelon, pivots, m.field, m.cols, fixed)
        basis.append(_normalize_leading(vector, m.field))
    return basis


def left_kernel_basis(m: Matrix) -> List[Vector]:
    """Basis of ``{v : v^T m = 0}``; dependency certificates among the rows."""
    return kernel_basis(m.transpose())


def solve_affine(m: Matrix, target: Sequence[Union[int, Fraction]]) -> Union[Vector, SolveOutcome]:
    """One solution of ``m x = target`` with free variables set to 0."""
    if len(target) != m.rows:
        raise DimensionMismatchError(f"target of length {len(target)} against {m.rows} rows")
    if m.rows == 0:
        return tuple([0] * m.cols)
    if m.cols == 0:
        consistent = all(m.field.coerce(v) == 0 for v in target)
        return tuple() if consistent else INCONSISTENT

    echelon, pivots, _ = _echelon(m, target)
    if pivots and pivots[-1] == m.cols:
        return INCONSISTENT
    pivot_set = set(pivots)
    fixed = {j: 0 for j in range(m.cols) if j not in pivot_set}
    solution = _back_substitute(echelon, pivots, m.field, m.cols, fixed, rhs_column=m.cols)
    return tuple(solution)


__all__ = [
    "Scalar",
    "Vector",
    "Field",
    "RATIONALS",
    "Matrix",
    "SolveOutcome",
    "INCONSISTENT",
    "ensure_same_field",
    "rank",
    "kernel_basis",
    "left_kernel_basis",
    "solve_affine",
]
