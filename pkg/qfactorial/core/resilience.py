from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, Optional, TypeVar

from qfactorial.core.errors import BudgetExceededError, ExhaustedAttemptsError

logger = logging.getLogger(__name__)

T = TypeVar("T")


@dataclass
class SearchBudget:
    """Work-unit accounting for exhaustive searches and scans."""

    limit: int
    spent: int = 0
    label: str = "search"
    max_points: Optional[int] = None
    max_degree: Optional[int] = None

    def charge(self, units: int = 1, partial: Optional[Any] = None) -> None:
        """Record ``units`` of work; raise once the limit is crossed."""
        self.spent += units
        if self.spent > self.limit:
            logger.warning("%s budget of %s units exceeded", self.label, self.limit)
            raise BudgetExceededError(f"{self.label} budget of {self.limit} units exceeded", partial=partial)

    def admits(self, num_points: int, degree: int) -> bool:
        """Whether an exhaustive search of this size is allowed at all."""
        if self.max_points is not None and num_points > self.max_points:
            return False
        return self.max_degree is None or degree <= self.max_degree


@dataclass(frozen=True)
class RetryPolicy:
    """Bounded retries whose sampling bound grows geometrically per round."""

    max_attempts: int = 64
    base_bound: int = 1000
    growth_factor: int = 2
    attempts_per_round: int = 8

    def bound_for(self, attempt: int) -> int:
        rounds = attempt // max(1, self.attempts_per_round)
        return self.base_bound * (self.growth_factor ** rounds)


def retry_with_growth(
    attempt_fn: Callable[[int, int], Optional[T]],
    policy: RetryPolicy,
    label: str,
) -> T:
    """Call ``attempt_fn(attempt, bound)`` until it returns a value.

    ``None`` means the attempt was rejected; after ``policy.max_attempts``
    rejections :class:`ExhaustedAttemptsError` is raised.
    """
    for attempt in range(policy.max_attempts):
        bound = policy.bound_for(attempt)
        result = attempt_fn(attempt, bound)
        if result is not None:
            if attempt:
                logger.info("%s accepted after %s rejected attempts", label, attempt)
            return result
        logger.warning("Attempt %s rejected for %s (bound %s)", attempt + 1, label, bound)

    logger.error("All %s attempts failed for %s", policy.max_attempts, label)
    raise ExhaustedAttemptsError(f"{label}: exhausted {policy.max_attempts} attempts")
