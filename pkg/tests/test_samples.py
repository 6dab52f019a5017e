"""Tests for the seeded rational sampler."""

from fractions import Fraction

import pytest

from src.samples import RationalSampler, load_seeds, sample_count, sampler_for


class TestRationalSampler:
    """Test cases for RationalSampler."""

    def test_deterministic(self):
        first, second = RationalSampler(42), RationalSampler(42)
        assert [first.rational() for _ in range(10)] == [second.rational() for _ in range(10)]

    def test_bounds(self):
        sampler = RationalSampler(7, numerator_bound=3, denominator_bound=2)
        for _ in range(50):
            value = sampler.rational()
            assert abs(value) <= 3
            assert value.denominator <= 2

    def test_nonzero(self):
        sampler = RationalSampler(3, numerator_bound=1, denominator_bound=1)
        assert all(sampler.rational(nonzero=True) for _ in range(20))

    def test_avoiding(self):
        sampler = RationalSampler(5, numerator_bound=1, denominator_bound=1)
        assert all(sampler.avoiding([0, 1]) == -1 for _ in range(10))

    def test_avoiding_gives_up(self):
        sampler = RationalSampler(5, numerator_bound=0, denominator_bound=1)
        with pytest.raises(RuntimeError):
            sampler.avoiding([0])

    def test_point_predicate(self):
        sampler = RationalSampler(11)
        point = sampler.point(4, lambda p: p[0] != p[1])
        assert len(point) == 4
        assert all(isinstance(v, Fraction) for v in point)
        assert point[0] != point[1]


class TestSeeds:
    """Test cases for the published seed list."""

    def test_every_suite_has_a_seed(self):
        seeds = load_seeds()
        expected = {
            "family",
            "par",
            "app",
            "determinant",
            "nondominant",
            "chart",
            "eta",
            "torelli",
            "elm",
            "conservation",
            "incidence",
        }
        assert set(seeds) == expected
        assert all(seed.quick <= seed.count for seed in seeds.values())

    def test_sample_count(self):
        assert sample_count("family") == 100
        assert sample_count("family", quick=True) == 8

    def test_samplers_repeat(self):
        first, second = sampler_for("par"), sampler_for("par")
        assert first.point(4) == second.point(4)

    def test_unknown_suite(self):
        with pytest.raises(ValueError, match="No published seed"):
            sampler_for("lagrangian")

    def test_unreadable_seed_file(self, tmp_path):
        path = tmp_path / "samples.yaml"
        path.write_text("- just\n- a list\n", encoding="utf-8")
        with pytest.raises(ValueError, match="has no 'suites' mapping"):
            load_seeds(path)
