from __future__ import annotations

from . import algebra, conditions, families, incidence, witness

__all__ = ["algebra", "conditions", "families", "incidence", "witness"]
