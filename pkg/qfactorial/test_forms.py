import math
import random
from fractions import Fraction

import pytest
import sympy

from qfactorial.core.errors import FieldMismatchError, FormSyntaxError, InhomogeneousFormError, NotSingularError
from qfactorial.exactalg import Field
from qfactorial.forms import (
    Form,
    classify_point,
    derivative,
    evaluate,
    format_form,
    hessian_rank_at,
    monomial_basis,
    parse_form,
    reduce_mod,
    substitute,
)


def _sympy(form):
    symbols = sympy.symbols(f"x0:{form.num_vars}")
    return sympy.sympify(format_form(form).replace("^", "**"), locals={str(s): s for s in symbols})


def _random(rng, num_vars, degree):
    basis = monomial_basis(num_vars, degree)
    return Form.from_coefficients(basis, [rng.randint(-3, 3) for _ in basis], num_vars, degree)


class TestParser:
    """Grammar, aliases and error positions."""

    def test_canonical_print_reparses(self):
        form = parse_form("x2^2 - 3*x0*x1 + 1/2*x0^2", 3)
        assert format_form(form) == "1/2*x0^2 - 3*x0*x1 + x2^2"
        assert parse_form(format_form(form), 3) == form

    def test_aliases_map_to_positions(self):
        assert parse_form("x*y - z*t", 4) == parse_form("x0*x1 - x2*x3", 4)
        assert parse_form("u^2 - w*x", 6) == parse_form("x5^2 - x4*x0", 6)

    def test_unary_minus_and_parentheses(self):
        assert parse_form("-(x0 - x1)^2", 2) == parse_form("-x0^2 + 2*x0*x1 - x1^2", 2)

    def test_syntax_error_reports_position(self):
        with pytest.raises(FormSyntaxError) as info:
            parse_form("x0 + * x1", 2)
        assert info.value.position == 5

    def test_unknown_and_out_of_range_variables(self):
        with pytest.raises(FormSyntaxError):
            parse_form("q^2", 3)
        with pytest.raises(FormSyntaxError):
            parse_form("x3", 3)

    def test_inhomogeneous_sum_rejected(self):
        with pytest.raises(InhomogeneousFormError):
            parse_form("x0^2 + x1", 2)
        with pytest.raises(InhomogeneousFormError):
            parse_form("(x0 + 1)*(x0 - 1)", 2)

    def test_degree_checked_after_expansion(self):
        assert parse_form("x0^2 + x1 - x1", 2) == parse_form("x0^2", 2)
        assert parse_form("x0*(x1 + 1) - x0", 2) == parse_form("x0*x1", 2)
        assert parse_form("(x0 + 1)^2 - 2*x0 - 1", 2, Field.prime(7)) == parse_form("x0^2", 2, Field.prime(7))

    def test_empty_expression(self):
        with pytest.raises(FormSyntaxError):
            parse_form("   ", 2)

    def test_cancellation_keeps_degree(self):
        zero = parse_form("x0*x1 - x1*x0", 2)
        assert zero.is_zero()
        assert zero.degree == 2
        assert format_form(zero) == "0"


class TestArithmetic:
    def test_products_and_powers_match_sympy(self):
        rng = random.Random(17)
        for _ in range(15):
            a = _random(rng, 3, rng.randint(1, 2))
            b = _random(rng, 3, rng.randint(1, 2))
            assert sympy.expand(_sympy(a * b) - _sympy(a) * _sympy(b)) == 0
            assert sympy.expand(_sympy(a**3) - _sympy(a) ** 3) == 0

    def test_evaluate_is_multiplicative(self):
        rng = random.Random(29)
        for _ in range(20):
            a = _random(rng, 3, rng.randint(0, 3))
            b = _random(rng, 3, rng.randint(0, 3))
            pt = [Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(3)]
            assert evaluate(a * b, pt) == evaluate(a, pt) * evaluate(b, pt)

    def test_euler_identity(self):
        rng = random.Random(13)
        for _ in range(15):
            num_vars, degree = rng.randint(1, 4), rng.randint(1, 4)
            form = _random(rng, num_vars, degree)
            total = Form.zero(num_vars, degree)
            for i in range(num_vars):
                total = total + Form.variable(i, num_vars) * derivative(form, i)
            assert total == form.scale(degree)

    def test_basis_sizes_are_binomial(self):
        for num_vars in range(1, 7):
            for degree in range(13):
                assert len(monomial_basis(num_vars, degree)) == math.comb(num_vars + degree - 1, degree)

    def test_binomial(self):
        cube = parse_form("(x0 + x1)^3", 2)
        assert cube == parse_form("x0^3 + 3*x0^2*x1 + 3*x0*x1^2 + x1^3", 2)

    def test_evaluate_exactly(self):
        form = parse_form("x0^2 - 2*x1^2", 2)
        assert evaluate(form, (1, 1)) == -1
        assert evaluate(form, (Fraction(1, 2), 0)) == Fraction(1, 4)

    def test_derivative(self):
        assert derivative(parse_form("x0^2*x1", 2), 0) == parse_form("2*x0*x1", 2)

    def test_substitute(self):
        form = parse_form("x0*x1", 2)
        images = [parse_form("x0 + x1", 2), parse_form("x0 - x1", 2)]
        assert substitute(form, images) == parse_form("x0^2 - x1^2", 2)

    def test_reduce_mod(self):
        reduced = reduce_mod(parse_form("1/2*x0", 1), 7)
        assert reduced.field == Field.prime(7)
        assert reduced.coefficient((1,)) == 4
        with pytest.raises(FieldMismatchError):
            reduce_mod(parse_form("1/7*x0", 1), 7)


class TestHessian:
    """Node classification in every admissible chart."""

    def test_ordinary_double_point_in_p4(self):
        form = parse_form("x0^2 + x1^2 + x2^2 + x3^2", 5)
        result = classify_point(form, (0, 0, 0, 0, 1))
        assert result.kind == "node"
        assert result.hessian_rank == 4

    def test_rank_three_cone_in_p4(self):
        form = parse_form("(x0^2 + x1^2 + x2^2)*x4", 5)
        result = classify_point(form, (0, 0, 0, 0, 1))
        assert result.kind == "degenerate"
        assert result.hessian_rank == 3

    def test_rank_two_quadratic_part(self):
        form = parse_form("x0^2*x4 + x1^2*x4 + x2^2*x3", 5)
        result = classify_point(form, (0, 0, 0, 0, 1))
        assert result.kind == "degenerate"
        assert result.hessian_rank == 2

    def test_node_rank_is_chart_independent(self):
        form = parse_form("(x0 - x3)^2 + (x1 - x3)^2 + (x2 - x3)^2", 4)
        for chart in range(4):
            assert hessian_rank_at(form, (1, 1, 1, 1), chart) == 3
        assert classify_point(form, (1, 1, 1, 1)).is_node

    def test_degenerate_rank_is_chart_independent(self):
        form = parse_form("(x0 - x3)^2 + (x1 - x3)^2", 4)
        assert {hessian_rank_at(form, (1, 1, 1, 1), chart) for chart in range(4)} == {2}

    def test_smooth_point(self):
        form = parse_form("x0^2 + x1^2 + x2^2 - x3^2", 4)
        assert classify_point(form, (0, 0, 1, 1)).kind == "not_singular"
        with pytest.raises(NotSingularError):
            hessian_rank_at(form, (0, 0, 1, 1))
