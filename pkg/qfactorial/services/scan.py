"""Vectorised scans of projective space over small prime fields."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from qfactorial.core.errors import DimensionMismatchError
from qfactorial.core.resilience import SearchBudget
from qfactorial.exactalg import Field
from qfactorial.forms import Form

logger = logging.getLogger(__name__)


def projective_size(num_vars: int, p: int) -> int:
    """Number of points of P^{num_vars-1}(F_p)."""
    return (p**num_vars - 1) // (p - 1)


def shard(num_vars: int, p: int, lead: int) -> np.ndarray:
    """Normalized points whose first nonzero coordinate (equal to 1) is ``lead``."""
    tail = num_vars - lead - 1
    count = p**tail
    points = np.zeros((count, num_vars), dtype=np.int64)
    points[:, lead] = 1
    if tail:
        grid = np.indices((p,) * tail, dtype=np.int64).reshape(tail, -1).T
        points[:, lead + 1 :] = grid
    return points


def evaluate_on(form: Form, points: np.ndarray, p: int) -> np.ndarray:
    """Values of ``form`` mod p at every row of ``points``."""
    field = Field.prime(p)
    n = points.shape[0]
    total = np.zeros(n, dtype=np.int64)
    powers: Dict[Tuple[int, int], np.ndarray] = {}

    def power(index: int, exponent: int) -> np.ndarray:
        key = (index, exponent)
        if key not in powers:
            if exponent == 1:
                powers[key] = points[:, index] % p
            else:
                powers[key] = power(index, exponent - 1) * points[:, index] % p
        return powers[key]

    for monomial, coefficient in form.terms:
        value = int(field.coerce(coefficient)) if form.field.is_rational else int(coefficient) % p
        if value == 0:
            continue
        term = np.full(n, value, dtype=np.int64)
        for index, exponent in enumerate(monomial):
            if exponent:
                term = term * power(index, exponent) % p
        total = (total + term) % p
    return total


def _shard_zeros(forms: Sequence[Form], num_vars: int, p: int, lead: int) -> np.ndarray:
    points = shard(num_vars, p, lead)
    mask = np.ones(points.shape[0], dtype=bool)
    for form in forms:
        if not mask.any():
            break
        candidates = points[mask]
        values = evaluate_on(form, candidates, p)
        keep = values == 0
        indices = np.flatnonzero(mask)
        mask[indices[~keep]] = False
    return points[mask]


def common_zeros(
    forms: Sequence[Form],
    num_vars: int,
    p: int,
    budget: Optional[SearchBudget] = None,
    workers: int = 1,
) -> List[Tuple[int, ...]]:
    """All points of P^{num_vars-1}(F_p) where every form vanishes.

    Points are normalized (first nonzero coordinate 1) and returned in scan
    order; shards are merged in lead-index order regardless of ``workers``.
    """
    for form in forms:
        if form.num_vars != num_vars:
            raise DimensionMismatchError(f"form in {form.num_vars} variables scanned in {num_vars}")
        if not form.field.is_rational and form.field.modulus != p:
            raise DimensionMismatchError(f"form over F_{form.field.modulus} scanned over F_{p}")
    Field.prime(p)

    size = projective_size(num_vars, p)
    if budget is not None:
        budget.charge(size)
    logger.debug("scanning %s points of P^%s(F_%s)", size, num_vars - 1, p)

    leads = range(num_vars)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            shards = list(executor.map(lambda lead: _shard_zeros(forms, num_vars, p, lead), leads))
    else:
        shards = [_shard_zeros(forms, num_vars, p, lead) for lead in leads]

    return [tuple(int(v) for v in row) for block in shards for row in block]


def count_common_zeros(
    forms: Sequence[Form],
    num_vars: int,
    p: int,
    budget: Optional[SearchBudget] = None,
    workers: int = 1,
) -> int:
    return len(common_zeros(forms, num_vars, p, budget, workers))


__all__ = ["projective_size", "shard", "evaluate_on", "common_zeros", "count_common_zeros"]
