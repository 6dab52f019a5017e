"""Tests for second-order jets."""

from fractions import Fraction

import pytest

from src.errors import DomainError
from src.jets import Jet2, jet2_eval, jet2_seed


class TestJet2:
    """Test cases for jet arithmetic."""

    def test_seed_marks_directions(self):
        u, v, w = jet2_seed((1, 2, 3), (0, 2))
        assert (u.v, u.d1, u.d2) == (1, 1, 0)
        assert (v.d1, v.d2) == (0, 0)
        assert (w.d1, w.d2) == (0, 1)

    def test_seed_rejects_bad_direction(self):
        with pytest.raises(DomainError):
            jet2_seed((1, 2), (0, 2))

    def test_product_rule(self):
        # d/du d/dv of u^2 v at (3, 5) is 2u = 6
        jet = jet2_eval(lambda u, v: u * u * v, (3, 5), (0, 1))
        assert jet.v == 45
        assert jet.d1 == 30
        assert jet.d2 == 9
        assert jet.d12 == 6
        assert jet.d11 == 10

    def test_quotient(self):
        jet = jet2_eval(lambda u, v: u / (u - v), (2, 1), (0, 1))
        # f = u/(u - v): f_u = -v/(u - v)^2, f_v = u/(u - v)^2
        assert jet.v == 2
        assert jet.d1 == -1
        assert jet.d2 == 2

    def test_reciprocal_at_zero(self):
        with pytest.raises(DomainError):
            jet2_eval(lambda u, v: 1 / (u - v), (1, 1), (0, 1))

    def test_power_and_constant(self):
        jet = jet2_eval(lambda u, v: u**-2 + 7, (2, 0), (0, 0))
        assert jet.v == Fraction(1, 4) + 7
        assert jet.d1 == Fraction(-1, 4)
        assert jet.d11 == Fraction(3, 8)

    def test_constant_expression(self):
        jet = jet2_eval(lambda u, v: Fraction(5), (1, 1), (0, 1))
        assert jet == Jet2.constant(Fraction(5))

    def test_lift(self):
        assert Jet2.lift(3).v == 3
        jet = Jet2(Fraction(1), Fraction(2))
        assert Jet2.lift(jet) is jet
