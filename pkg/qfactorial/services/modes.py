from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from qfactorial.core.errors import InputError

DOUBLE_SOLID = "double_solid"
HYPERSURFACE = "hypersurface"


@dataclass(frozen=True)
class Mode:
    """Double solid branched in degree 2r over P^3, or degree-n hypersurface in P^4."""

    kind: str
    param: int

    def __post_init__(self) -> None:
        if self.kind not in (DOUBLE_SOLID, HYPERSURFACE):
            raise InputError(f"unknown mode {self.kind!r}")
        if self.param < 1:
            raise InputError(f"{self.symbol} must be at least 1, got {self.param}")

    @classmethod
    def double_solid(cls, r: int) -> "Mode":
        return cls(DOUBLE_SOLID, r)

    @classmethod
    def hypersurface(cls, n: int) -> "Mode":
        return cls(HYPERSURFACE, n)

    @classmethod
    def parse(cls, kind: str, param: int) -> "Mode":
        return cls(kind.replace("-", "_"), param)

    @property
    def is_double_solid(self) -> bool:
        return self.kind == DOUBLE_SOLID

    @property
    def symbol(self) -> str:
        return "r" if self.kind == DOUBLE_SOLID else "n"

    @property
    def label(self) -> str:
        return f"{self.kind}({self.symbol}={self.param})"

    @property
    def ambient_dim(self) -> int:
        return 3 if self.is_double_solid else 4

    @property
    def num_vars(self) -> int:
        return self.ambient_dim + 1

    @property
    def critical_degree(self) -> int:
        """3r - 4 or 2n - 5; may be negative for tiny parameters."""
        return 3 * self.param - 4 if self.is_double_solid else 2 * self.param - 5

    @property
    def multiplier(self) -> int:
        """Per-degree incidence allowance: 2r - 1 or n - 1."""
        return 2 * self.param - 1 if self.is_double_solid else self.param - 1

    @property
    def step(self) -> int:
        """Degree consumed per unit of (j - 1) by an oversized part."""
        return 3 if self.is_double_solid else 4

    @property
    def minimum_residual_degree(self) -> int:
        return 6 if self.is_double_solid else 5

    @property
    def part_sum_bound(self) -> Fraction:
        """Strict upper bound for the sum of j * c_j: r/3 or (n - 1)/4."""
        if self.is_double_solid:
            return Fraction(self.param, 3)
        return Fraction(self.param - 1, 4)

    @property
    def theorem_bound(self) -> Fraction:
        if self.is_double_solid:
            return Fraction((2 * self.param - 1) * self.param, 3)
        return Fraction((self.param - 1) ** 2, 4)

    @property
    def cy_bound(self) -> Optional[int]:
        """Sharper node bound for the Calabi-Yau members (r = 4, n = 5)."""
        if self.is_double_solid and self.param == 4:
            return 25
        if not self.is_double_solid and self.param == 5:
            return 14
        return None

    @property
    def effective_bound(self) -> Fraction:
        if self.cy_bound is not None and self.cy_bound > self.theorem_bound:
            return Fraction(self.cy_bound)
        return self.theorem_bound

    @property
    def elementary_bound(self) -> int:
        """Node counts at or below this impose independent conditions automatically."""
        return 3 * self.param - 3 if self.is_double_solid else 2 * self.param - 4

    @property
    def degree_cap(self) -> int:
        if self.is_double_solid:
            return max(3, self.param // 3)
        return max(3, (self.param - 1) // 4)

    @property
    def max_base_locus_degree(self) -> Fraction:
        """Forms of degree strictly below this feed the base-locus criterion."""
        if self.is_double_solid:
            return Fraction(self.param)
        return Fraction(self.param, 2)


__all__ = ["Mode", "DOUBLE_SOLID", "HYPERSURFACE"]
