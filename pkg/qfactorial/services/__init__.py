from __future__ import annotations

from . import conditions, families, incidence, modes, pipeline, scan

__all__ = ["conditions", "families", "incidence", "modes", "pipeline", "scan"]
