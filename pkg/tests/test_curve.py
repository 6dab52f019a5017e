"""Tests for the curve module."""

import itertools
from fractions import Fraction

import pytest

from src.curve import (
    INSTANCES,
    TRIVIAL_CLASS,
    W_INF,
    CurveElement,
    CurveInstance,
    CurvePoint,
    Divisor,
    DivisorClass,
    class_add,
    class_mul,
    class_neg,
    class_of,
    divisor_of,
    group_add,
    group_mul,
    group_neg,
    group_sum,
    h0,
    in_linear_system,
    linear_equiv,
    local_series,
    on_curve,
    point_class,
    poles_of,
    residue,
    residue_sum,
    valuation,
)
from src.errors import DomainError, InvalidInstanceError, UnsupportedLocusError
from src.exact import QQ_EPS, RatFunc


@pytest.fixture
def inst():
    return INSTANCES["A"]


@pytest.fixture
def x(inst):
    return inst.x_element()


@pytest.fixture
def y(inst):
    return inst.y_element()


class TestCurveInstance:
    """Test cases for instance validation and named points."""

    def test_preset_a(self, inst):
        assert (inst.lam, inst.t, inst.r) == (-3, 3, 6)
        assert inst.t1 == CurvePoint(3, 6)
        assert inst.t2 == CurvePoint(3, -6)
        assert inst.w_lam == CurvePoint(-3, 0)

    def test_from_parameters_computes_r(self):
        inst = CurveInstance.from_parameters(-3, 3, Fraction(1, 3), Fraction(1, 5))
        assert inst == INSTANCES["A"]

    @pytest.mark.parametrize(
        "lam,t,r",
        [(1, 3, 6), (0, 3, 6), (-3, 0, 0), (-3, 1, 0), (-3, -3, 0), (-3, 3, 5), (-3, 3, 0)],
    )
    def test_invalid_instances(self, lam, t, r):
        with pytest.raises(InvalidInstanceError):
            CurveInstance(lam, t, r)

    def test_non_square_t(self):
        with pytest.raises(InvalidInstanceError, match="not a rational square"):
            CurveInstance.from_parameters(-3, 2)

    def test_invalid_literal(self):
        with pytest.raises(InvalidInstanceError, match="Invalid nu1"):
            CurveInstance(-3, 3, 6, "1/0")

    def test_named_point(self, inst):
        assert inst.named_point("w_lam") == CurvePoint(-3, 0)
        assert inst.named_point("(-1,2)") == CurvePoint(-1, 2)
        assert inst.named_point("inf") == W_INF
        with pytest.raises(DomainError):
            inst.named_point("(3,5)")

    def test_to_record(self, inst):
        assert inst.to_record() == {"lambda": "-3", "t": "3", "r": "6", "nu1": "1/3", "nu2": "1/5"}


class TestCurvePoint:
    """Test cases for point parsing."""

    def test_parse(self):
        assert CurvePoint.parse("inf").is_infinity
        assert CurvePoint.parse(" (3,-6) ") == CurvePoint(3, -6)
        assert str(CurvePoint(Fraction(1, 2), -1)) == "(1/2,-1)"

    @pytest.mark.parametrize("text", ["(3;6)", "3,6", "(a,b)"])
    def test_parse_rejects(self, text):
        with pytest.raises(DomainError):
            CurvePoint.parse(text)

    def test_half_specified_point(self):
        with pytest.raises(DomainError):
            CurvePoint(1)

    def test_on_curve(self, inst):
        assert on_curve(inst, CurvePoint(3, 6))
        assert not on_curve(inst, CurvePoint(3, 5))
        assert on_curve(inst, W_INF)


class TestGroupLaw:
    """Test cases for the chord-tangent group law."""

    @pytest.fixture
    def points(self, inst):
        return [W_INF, inst.w0, inst.w1, inst.w_lam, inst.t1, inst.t2, CurvePoint(-1, 2), CurvePoint(-1, -2)]

    def test_negation(self, inst):
        assert group_neg(inst, inst.t1) == inst.t2

    def test_two_torsion(self, inst):
        assert group_add(inst, inst.w0, inst.w1) == inst.w_lam
        assert group_mul(inst, 2, inst.w0) == W_INF

    def test_inverse_pair(self, inst):
        assert group_add(inst, inst.t1, inst.t2) == W_INF

    def test_identity_and_associativity(self, inst, points):
        for p in points:
            assert group_add(inst, p, W_INF) == p
        for p, q, r in itertools.product(points, repeat=3):
            left = group_add(inst, group_add(inst, p, q), r)
            right = group_add(inst, p, group_add(inst, q, r))
            assert left == right
            assert on_curve(inst, left)

    def test_multiples(self, inst):
        p = CurvePoint(-1, 2)
        assert group_mul(inst, 3, p) == group_sum(inst, [p, p, p])
        assert group_mul(inst, -1, inst.t1) == inst.t2
        assert group_mul(inst, 0, p) == W_INF


class TestCurveElement:
    """Test cases for function-field arithmetic."""

    def test_defining_relation(self, inst, y):
        assert y * y == inst.element(RatFunc(inst.cubic()))

    def test_inverse_of_y(self, inst, y):
        assert 1 / y == inst.element(0, 1 / RatFunc(inst.cubic()))

    def test_difference_of_squares(self, inst, x, y):
        assert (x + y) * (x - y) == x * x - inst.element(RatFunc(inst.cubic()))

    def test_division_by_zero(self, inst, x):
        with pytest.raises(DomainError):
            x / inst.element(0)

    def test_text_round_trip(self, inst, x, y):
        g = (x - 3) / y + x * x
        assert CurveElement.from_text(inst, g.to_text()) == g

    def test_from_text_rejects(self, inst):
        with pytest.raises(DomainError):
            CurveElement.from_text(inst, "[1]/[1]")


class TestValuation:
    """Test cases for valuations and local series."""

    def test_orders_at_infinity(self, inst, x, y):
        assert valuation(inst, x, W_INF) == -2
        assert valuation(inst, y, W_INF) == -3

    def test_order_at_two_torsion(self, inst, x):
        assert valuation(inst, x, inst.w0) == 2

    def test_order_at_marked_point(self, inst, x):
        assert valuation(inst, x - inst.t, inst.t1) == 1

    def test_zero_function(self, inst):
        with pytest.raises(DomainError):
            valuation(inst, inst.element(0), inst.w0)

    def test_valuation_is_additive(self, inst, x, y):
        g, h = (x - 3) / y, y + x * x
        for point in (inst.w0, inst.t1, W_INF, CurvePoint(-1, 2)):
            assert valuation(inst, g * h, point) == valuation(inst, g, point) + valuation(inst, h, point)

    def test_series_of_pole(self, inst, x):
        series = local_series(inst, 1 / (x - inst.t), inst.t1, 0)
        assert series.valuation == -1
        assert series.coefficient(-1) == 1

    def test_series_of_y(self, inst, y):
        assert local_series(inst, y, inst.t1, 1).coefficient(0) == 6

    def test_series_of_x_at_w0(self, inst, x):
        # y^2 = x (x - 1)(x + 3), so x = -y^2/3 + O(y^4)
        series = local_series(inst, x, inst.w0, 3)
        assert series.valuation == 2
        assert series.coefficient(2) == Fraction(-1, 3)

    def test_residue(self, inst, x):
        assert residue(inst, 1 / (x - inst.t), inst.t1) == Fraction(1, 6)
        assert residue(inst, 1 / (x - inst.t), inst.t2) == Fraction(-1, 6)


class TestDivisors:
    """Test cases for divisors, classes and linear systems."""

    def test_divisor_of_x_minus_t(self, inst, x):
        assert divisor_of(inst, x - inst.t) == Divisor.of({inst.t1: 1, inst.t2: 1, W_INF: -2})

    def test_divisor_of_y(self, inst, y):
        assert divisor_of(inst, y) == Divisor.of({inst.w0: 1, inst.w1: 1, inst.w_lam: 1, W_INF: -3})

    def test_divisor_of_constant(self, inst):
        assert divisor_of(inst, inst.element(1)) == Divisor()

    def test_conjugate_block(self, inst, x):
        divisor = divisor_of(inst, x * x + 1)
        assert divisor.degree == 0
        assert divisor.blocks == (("[1,0,1]", 1, 4),)

    def test_unsupported_locus(self, inst, x, y):
        with pytest.raises(UnsupportedLocusError):
            divisor_of(inst, y - x * x - 1)

    def test_poles_of(self, inst, x, y):
        assert poles_of(inst, y / (x - inst.t)) == Divisor.of({inst.t1: 1, inst.t2: 1, W_INF: 1})

    def test_linear_equivalence(self, inst):
        torsion = Divisor.of({inst.w0: 1, inst.w1: 1, inst.w_lam: 1})
        assert linear_equiv(inst, torsion, Divisor.of({W_INF: 3}))
        assert not linear_equiv(inst, Divisor.of({inst.t1: 1}), Divisor.of({W_INF: 1}))

    def test_h0(self, inst):
        assert h0(inst, class_of(inst, Divisor.of({W_INF: 1, inst.t1: 1, inst.t2: 1}))) == 3
        assert h0(inst, class_of(inst, Divisor.of({W_INF: 1, inst.t1: -1}))) == 0
        assert h0(inst, TRIVIAL_CLASS) == 1
        assert h0(inst, DivisorClass(-1, W_INF)) == 0

    def test_class_arithmetic(self, inst):
        cls = point_class(inst.t1)
        assert class_add(inst, cls, class_neg(inst, cls)) == TRIVIAL_CLASS
        assert class_mul(inst, 2, point_class(inst.w0)) == DivisorClass(2, W_INF)

    @pytest.mark.parametrize(
        "build,divisor_name,expected",
        [
            (lambda x, y, t: 1 / (x - t), "d_plus_inf", True),
            (lambda x, y, t: y / (x - t), "d_plus_inf", True),
            (lambda x, y, t: x, "d", False),
        ],
    )
    def test_in_linear_system(self, inst, x, y, build, divisor_name, expected):
        divisors = {"d": inst.divisor_d(), "d_plus_inf": inst.divisor_d() + Divisor.of({W_INF: 1})}
        assert in_linear_system(inst, build(x, y, inst.t), divisors[divisor_name]) is expected

    def test_residue_theorem(self, inst, x, y):
        g = 1 / (x - inst.t) + 3 * x / y - y / (x * (x - inst.t))
        assert residue_sum(inst, g) == 0

    def test_divisor_needs_rational_coefficients(self, inst):
        with pytest.raises(DomainError):
            divisor_of(inst, inst.x_element(QQ_EPS))
