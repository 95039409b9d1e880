import random
from fractions import Fraction

import pytest
import sympy

from qfactorial.core.errors import DimensionMismatchError, InputError
from qfactorial.exactalg import Field
from qfactorial.forms import evaluate, parse_form
from qfactorial.projgeom import ProjPoint
from qfactorial.services.conditions import (
    HEURISTIC,
    base_locus_criterion,
    base_locus_dim_probe,
    defect,
    estimate_dimension,
    evaluation_matrix,
    forms_through,
    non_vanishing_check,
    q_factoriality_verdict,
    separating_form,
)
from qfactorial.services.modes import Mode


def _plane_points(rng, size):
    """Distinct points of P^2 with coordinates in [-6, 6]."""
    points = {}
    while len(points) < size:
        coords = [rng.randint(-6, 6) for _ in range(3)]
        if any(coords):
            point = ProjPoint.of(coords)
            points.setdefault(point, point)
    return list(points)


@pytest.fixture
def grid():
    """Nine intersection points of two triples of lines in the plane."""
    return [ProjPoint.of((a, b, 1)) for a in (1, 2, 3) for b in (1, 2, 3)]


@pytest.fixture
def grid_p4():
    return [ProjPoint.of((0, 0, a, b, 1)) for a in (1, 2, 3) for b in (1, 2, 3)]


@pytest.fixture
def five_points():
    return [ProjPoint.of(c) for c in ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (1, 1, 1, 1))]


class TestDefect:
    """Rank, defect and their certificates."""

    def test_grid_is_dependent_in_degree_three(self, grid):
        assert len(set(grid)) == 9
        report = defect(grid, 3, 3)
        assert (report.rank, report.defect, report.independent) == (8, 1, False)
        assert len(report.dependency) == 9
        assert all(weight != 0 for weight in report.dependency)

    def test_grid_is_independent_in_degree_four(self, grid):
        report = defect(grid, 4, 3)
        assert report.defect == 0
        assert len(report.separators) == 9
        for i, form in enumerate(report.separators):
            assert evaluate(form, grid[i].coords) == 1

    def test_rank_agrees_with_sympy_and_two_primes(self, grid):
        rows = evaluation_matrix(grid, 3, 3).row_lists()
        assert sympy.Matrix(rows).rank() == 8
        for p in (10007, 65521):
            assert defect(grid, 3, 3, Field.prime(p)).rank == 8

    def test_parallel_separators_match_sequential(self, grid):
        assert defect(grid, 4, 3, workers=3).separators == defect(grid, 4, 3).separators

    def test_negative_degree_imposes_nothing(self, grid):
        report = defect(grid, -1, 3)
        assert report.rank == 0
        assert report.defect == 9

    def test_dimension_checked(self, grid):
        with pytest.raises(DimensionMismatchError):
            defect(grid, 2, 4)


class TestDefectProperties:
    """Seeded random plane configurations."""

    def test_order_and_rescaling_do_not_matter(self):
        rng = random.Random(8)
        for _ in range(10):
            pts = _plane_points(rng, rng.randint(4, 9))
            shuffled = rng.sample(pts, len(pts))
            rescaled = [ProjPoint.of([rng.choice((-3, 2, 5)) * c for c in p.coords]) for p in pts]
            for degree in (1, 2, 3):
                expected = defect(pts, degree, 3).defect
                assert defect(shuffled, degree, 3).defect == expected
                assert defect(rescaled, degree, 3).defect == expected

    def test_defect_never_grows_with_degree(self):
        rng = random.Random(19)
        for _ in range(10):
            pts = _plane_points(rng, rng.randint(3, 10))
            defects = [defect(pts, degree, 3).defect for degree in range(6)]
            assert defects == sorted(defects, reverse=True)

    def test_rational_defect_is_a_lower_bound_mod_p(self):
        rng = random.Random(23)
        for _ in range(10):
            pts = _plane_points(rng, rng.randint(4, 9))
            for degree in (1, 2, 3):
                over_q = defect(pts, degree, 3).defect
                for p in (7, 11, 13):
                    field = Field.prime(p)
                    reduced = [ProjPoint.of(point.coords, field) for point in pts]
                    assert defect(reduced, degree, 3, field).defect >= over_q
                for p in (1_000_003, 1_000_033, 1_000_037):
                    field = Field.prime(p)
                    reduced = [ProjPoint.of(point.coords, field) for point in pts]
                    assert defect(reduced, degree, 3, field).defect == over_q

    def test_single_point_has_no_defect(self):
        point = [ProjPoint.of((2, -1, 3))]
        assert all(defect(point, degree, 3).defect == 0 for degree in range(5))


class TestSeparatingForm:
    def test_none_for_dependent_point(self, grid):
        assert all(separating_form(grid, i, 3, 3) is None for i in range(9))

    def test_value_one_at_the_point(self, grid):
        form = separating_form(grid, 4, 4, 3)
        values = [evaluate(form, point.coords) for point in grid]
        assert values[4] == 1
        assert all(v == 0 for i, v in enumerate(values) if i != 4)


class TestVerdict:
    def test_hypersurface_grid_is_not_q_factorial(self, grid_p4):
        verdict = q_factoriality_verdict(Mode.hypersurface(4), grid_p4)
        assert verdict.degree == 3
        assert verdict.bound == Fraction(9, 4)
        assert not verdict.bound_ok
        assert verdict.defect == 1
        assert not verdict.q_factorial

    def test_five_nodes_of_a_double_solid(self, five_points):
        verdict = q_factoriality_verdict(Mode.double_solid(3), five_points)
        assert verdict.bound == 5
        assert verdict.bound_ok
        assert verdict.degree == 5
        assert verdict.q_factorial

    def test_calabi_yau_bound_is_used(self):
        mode = Mode.double_solid(4)
        assert mode.theorem_bound == Fraction(28, 3)
        assert mode.effective_bound == 25


class TestBaseLocus:
    """Heuristic probes; every record carries the HEURISTIC label."""

    def test_dimension_estimates(self):
        assert estimate_dimension((5, 29), (0, 0)) == (None, True)
        assert estimate_dimension((5, 29), (6, 30)) == (1, False)
        assert estimate_dimension((5, 29), (3, 3)) == (0, False)

    def test_base_locus_of_point_line_and_plane(self):
        x0, x1 = parse_form("x0", 3), parse_form("x1", 3)
        point = base_locus_dim_probe([x0, x1], 3)
        assert point.counts == (1, 1)
        assert point.zero_dimensional
        assert point.label == HEURISTIC
        assert base_locus_dim_probe([x0], 3).estimate == 1
        assert base_locus_dim_probe([], 3).estimate == 2

    def test_check_primes_must_increase(self):
        with pytest.raises(InputError):
            base_locus_dim_probe([parse_form("x0", 3)], 3, primes=(29, 5))

    def test_forms_through_grid(self, grid):
        assert len(forms_through(grid, 3, 3)) == 2
        assert len(forms_through(grid, 2, 3)) == 0

    def test_non_vanishing_prediction_confirmed(self):
        corners = [ProjPoint.of(c) for c in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
        check = non_vanishing_check(corners, 2, 3)
        assert check.linear_system_size == 3
        assert check.probe.counts == (3, 3)
        assert check.predicted_independent
        assert check.predicted_degree == 2
        assert check.report.independent
        assert check.agrees

    def test_empty_system_predicts_nothing(self):
        corners = [ProjPoint.of(c) for c in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
        check = non_vanishing_check(corners, 1, 3)
        assert check.linear_system_size == 0
        assert not check.predicted_independent
        assert check.report.defect == 2
        assert check.agrees

    def test_criterion_on_coordinate_points(self):
        corners = [ProjPoint.of(c) for c in ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))]
        result = base_locus_criterion(Mode.double_solid(3), corners, 2)
        assert result.linear_system_size == 6
        assert result.probe.zero_dimensional
        assert result.within_elementary_bound
        assert result.q_factorial is True

    def test_criterion_degree_range(self):
        corners = [ProjPoint.of(c) for c in ((1, 0, 0, 0, 0), (0, 1, 0, 0, 0))]
        with pytest.raises(InputError):
            base_locus_criterion(Mode.hypersurface(4), corners, 2)
