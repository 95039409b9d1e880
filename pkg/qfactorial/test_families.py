from fractions import Fraction
from itertools import product

import pytest

from qfactorial.core.errors import BudgetExceededError, DegreeMismatchError, InputError
from qfactorial.core.resilience import SearchBudget
from qfactorial.exactalg import Field
from qfactorial.forms import Form, classify_point, parse_form
from qfactorial.projgeom import ProjPoint
from qfactorial.services.families import (
    EXAMPLE_II,
    FOURFOLD,
    find_nodes,
    make_example_I,
    make_fourfold,
    max_nodes,
    random_family,
    split_example_I,
    split_example_II,
    theorem_bound,
    varchenko_bound,
)
from qfactorial.services.modes import Mode

F7 = Field.prime(7)


def _brute_force_varchenko(i, j):
    lower = Fraction((i - 2) * j, 2) + 1
    upper = Fraction(i * j, 2)
    return sum(1 for values in product(range(1, j), repeat=i) if lower < sum(values) <= upper)


class TestVarchenko:
    @pytest.mark.parametrize(
        "i,j,expected",
        [(3, 6, 68), (3, 8, 180), (3, 10, 375), (4, 4, 45), (4, 5, 135), (4, 6, 320)],
    )
    def test_golden_values(self, i, j, expected):
        assert varchenko_bound(i, j) == expected

    def test_matches_enumeration(self):
        for i in range(2, 5):
            for j in range(2, 9):
                assert varchenko_bound(i, j) == _brute_force_varchenko(i, j)

    def test_arguments_checked(self):
        with pytest.raises(InputError):
            varchenko_bound(1, 4)

    def test_max_nodes_per_mode(self):
        assert max_nodes(Mode.double_solid(3)) == 68
        assert max_nodes(Mode.hypersurface(5)) == 135


class TestBounds:
    def test_theorem_bounds(self):
        assert theorem_bound("double_solid", 3) == 5
        assert theorem_bound("hypersurface", 4) == Fraction(9, 4)
        assert theorem_bound("cy_double_solid") == 25
        assert theorem_bound("cy_quintic") == 14

    def test_unknown_kind(self):
        with pytest.raises(InputError):
            theorem_bound("cubic")


class TestFamilies:
    def test_split_example_II_nodes_over_f7(self):
        instance = split_example_II(4)
        assert instance.expected_nodes == 9
        nodes = find_nodes(instance, 7)
        expected = {ProjPoint.of((0, 0, a, b, 1), F7) for a in (1, 2, 3) for b in (1, 2, 3)}
        assert set(nodes.points) == expected
        assert nodes.counts() == {"node": 9}
        assert all(cls.hessian_rank == 4 for cls in nodes.classes)

    def test_split_example_I_nodes_over_f7(self):
        instance = split_example_I(2)
        assert instance.expected_nodes == 6
        nodes = find_nodes(instance, 7)
        expected = {ProjPoint.of((0, a, b, 1), F7) for a in (1, 2) for b in (1, 2, 3)}
        assert set(nodes.nodes) == expected
        assert len(nodes.points) == 6

    def test_scan_budget(self):
        with pytest.raises(BudgetExceededError):
            find_nodes(split_example_II(4), 7, SearchBudget(100))

    def test_example_I_degrees_checked(self):
        g = parse_form("x0^2", 4)
        with pytest.raises(DegreeMismatchError):
            make_example_I(2, g, parse_form("x1", 4), parse_form("x2^2", 4))

    def test_example_I_equation(self):
        g, h, f = parse_form("x1", 4), parse_form("x0", 4), parse_form("x2", 4)
        instance = make_example_I(1, g, h, f)
        assert instance.equation == parse_form("x1^2 + x0*x2", 4)
        assert instance.mode == Mode.double_solid(1)

    def test_fourfold_recipe(self):
        instance = random_family(FOURFOLD, None, seed=5)
        assert instance.equation.degree == 8
        assert instance.ambient_dim == 4
        assert [instance.component(f"f{i}").degree for i in (1, 2, 3)] == [2, 4, 6]

    def test_fourfold_degrees_checked(self):
        x = Form.variable(0, 5)
        with pytest.raises(DegreeMismatchError):
            make_fourfold([(x, x), (x, x), (x, x)])

    def test_random_family_is_seeded(self):
        assert random_family(EXAMPLE_II, 4, seed=9) == random_family(EXAMPLE_II, 4, seed=9)
        assert random_family(EXAMPLE_II, 4, seed=9) != random_family(EXAMPLE_II, 4, seed=10)

    def test_fourfold_is_degenerate_along_the_common_zeros(self):
        x0, x1, x2, x3, x4 = (Form.variable(i, 5) for i in range(5))
        instance = make_fourfold([(x3 * x3, x0 * x0 * x0), (x4**4, x1 * x1), (x3**6, x2)])
        result = classify_point(instance.equation, (0, 0, 0, 1, 1))
        assert result.kind == "degenerate"
        assert result.hessian_rank == 1
