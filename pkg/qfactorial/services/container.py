from __future__ import annotations

from functools import lru_cache

from qfactorial.core.resilience import SearchBudget
from qfactorial.core.settings import Settings
from qfactorial.services.incidence import search_budget
from qfactorial.services.pipeline import WitnessPipeline


@lru_cache(maxsize=8)
def get_pipeline_for(settings: Settings) -> WitnessPipeline:
    return WitnessPipeline(settings=settings)


def get_search_budget(settings: Settings) -> SearchBudget:
    return search_budget(settings)


def get_scan_budget(settings: Settings) -> SearchBudget:
    return SearchBudget(settings.scan_budget, label="F_p scan")
