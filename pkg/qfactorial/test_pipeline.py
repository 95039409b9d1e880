import dataclasses
import random

import pytest

from qfactorial.core.errors import BudgetExceededError, CertificateError, FieldMismatchError, InputError
from qfactorial.core.settings import Settings
from qfactorial.exactalg import Field
from qfactorial.forms import evaluate
from qfactorial.projgeom import ProjPoint
from qfactorial.services.container import get_pipeline_for
from qfactorial.services.incidence import max_points_on_curve
from qfactorial.services.modes import Mode
from qfactorial.services.pipeline import CONE_COMPOSITE, DIRECT_SOLVE, WitnessPipeline


@pytest.fixture
def pipeline():
    return WitnessPipeline(Settings())


@pytest.fixture
def grid():
    return [ProjPoint.of((a, b, 1)) for a in (1, 2, 3) for b in (1, 2, 3)]


@pytest.fixture
def grid_p4():
    return [ProjPoint.of((0, 0, a, b, 1)) for a in (1, 2, 3) for b in (1, 2, 3)]


@pytest.fixture
def five_points():
    return [ProjPoint.of(c) for c in ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (1, 1, 1, 1))]


@pytest.fixture
def six_points():
    return [
        ProjPoint.of(c)
        for c in ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (1, 1, 1, 1), (1, 2, 3, 4))
    ]


class TestWitnessDirect:
    def test_certificate_verifies(self, pipeline, grid):
        certificate = pipeline.witness_direct(grid, 4, 4)
        assert certificate.construction == DIRECT_SOLVE
        assert certificate.point == grid[4]
        certificate.verify()

    def test_no_separator_for_dependent_point(self, pipeline, grid):
        assert pipeline.witness_direct(grid, 0, 3) is None

    def test_index_checked(self, pipeline, grid):
        with pytest.raises(InputError):
            pipeline.witness_direct(grid, 9, 4)

    def test_tampered_certificate_rejected(self, pipeline, grid):
        certificate = pipeline.witness_direct(grid, 4, 4)
        values = list(certificate.values)
        values[0] = 1
        with pytest.raises(CertificateError):
            dataclasses.replace(certificate, values=tuple(values)).verify()


class TestWitnessCone:
    """Cone-over-plane-curve witnesses and their fallback."""

    def test_cone_when_the_ledger_passes(self, pipeline, six_points):
        mode = Mode.double_solid(4)
        cone = pipeline.witness_cone(six_points, 5, mode, seed=11)
        assert cone.construction == CONE_COMPOSITE
        assert cone.fallback_reason is None
        assert cone.degree == 8
        assert cone.partition.ledger_passed
        cone.verify()
        direct = pipeline.witness_direct(six_points, 5, mode.critical_degree)
        direct.verify()

    def test_fallback_when_the_ledger_fails(self, pipeline, five_points):
        certificate = pipeline.witness_cone(five_points, 0, Mode.double_solid(3), seed=4)
        assert certificate.construction == DIRECT_SOLVE
        assert certificate.fallback_reason.startswith("ledger failed")
        assert certificate.partition is not None
        certificate.verify()

    def test_seeded_cones_are_reproducible(self, pipeline, six_points):
        mode = Mode.double_solid(4)
        first = pipeline.witness_cone(six_points, 2, mode, seed=8)
        second = pipeline.witness_cone(six_points, 2, mode, seed=8)
        assert first.witness == second.witness
        assert first.projection == second.projection


class TestFullReport:
    def test_dependent_grid(self, pipeline, grid_p4):
        report = pipeline.full_report(grid_p4, Mode.hypersurface(4), seed=1)
        assert report.defect == 1
        assert report.dependent_count == 1
        assert report.no_separator_count == 9
        assert report.statuses[-1].dependent_on_earlier
        assert not report.q_factorial
        assert report.projection_injective

    def test_independent_nodes(self, pipeline, five_points):
        report = pipeline.full_report(five_points, Mode.double_solid(3), seed=2)
        assert report.q_factorial
        assert report.dependent_count == 0
        assert report.no_separator_count == 0
        assert [degree for degree, _ in report.profile] == [1, 2, 3]

    def test_threaded_solves_agree(self, grid_p4):
        sequential = WitnessPipeline(Settings()).full_report(grid_p4, Mode.hypersurface(4), seed=1)
        threaded = WitnessPipeline(dataclasses.replace(Settings(), workers=3)).full_report(
            grid_p4, Mode.hypersurface(4), seed=1
        )
        assert sequential.statuses == threaded.statuses


def test_dependent_flags_mark_the_last_grid_point(pipeline, grid):
    assert pipeline.dependent_flags(grid, 3) == [False] * 8 + [True]


def test_separating_values(pipeline, grid):
    certificate = pipeline.witness_direct(grid, 2, 4)
    assert [evaluate(certificate.witness, p.coords) != 0 for p in grid] == [i == 2 for i in range(9)]


def test_container_caches_pipelines():
    settings = Settings()
    assert get_pipeline_for(settings) is get_pipeline_for(settings)


def _generic_points(seed, count, num_vars=4, bound=20):
    rng = random.Random(seed)
    points = {}
    while len(points) < count:
        coords = [rng.randint(-bound, bound) for _ in range(num_vars)]
        if any(coords):
            point = ProjPoint.of(coords)
            points.setdefault(point, point)
    return list(points)


class TestBoundaryCases:
    def test_cone_at_the_bound_for_r5(self, pipeline):
        points = _generic_points(5, 15)
        mode = Mode.double_solid(5)
        cone = pipeline.witness_cone(points, 0, mode, seed=1)
        assert cone.construction == CONE_COMPOSITE
        assert cone.fallback_reason is None
        assert cone.partition.residual_degree == 11
        assert cone.partition.ledger_status == "pass"
        cone.verify()
        pipeline.witness_direct(points, 0, 11).verify()

    def test_budget_carries_the_settings_limits(self):
        conic = [ProjPoint.of((1, t, t * t)) for t in range(8)]
        capped = WitnessPipeline(dataclasses.replace(Settings(), max_curve_degree=1))
        with pytest.raises(BudgetExceededError, match="degree 1"):
            max_points_on_curve(conic, 2, capped.budget())
        assert max_points_on_curve(conic, 2, WitnessPipeline(Settings()).budget()).count == 8

    def test_cone_needs_rational_nodes(self, five_points):
        over_f7 = WitnessPipeline(Settings(), Field.prime(7))
        nodes = [ProjPoint.of(p.coords, Field.prime(7)) for p in five_points]
        with pytest.raises(FieldMismatchError):
            over_f7.witness_cone(nodes, 0, Mode.double_solid(3), seed=1)

    def test_full_report_over_a_prime_skips_the_partition(self, grid_p4):
        over_f7 = WitnessPipeline(Settings(), Field.prime(7))
        nodes = [ProjPoint.of(p.coords, Field.prime(7)) for p in grid_p4]
        report = over_f7.full_report(nodes, Mode.hypersurface(4), seed=1)
        assert report.defect == 1
        assert report.partition is None
        assert "Q only" in report.partition_error
