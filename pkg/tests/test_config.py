"""Tests for instance files and instance resolution."""

from fractions import Fraction

import pytest

from src.config import load_config_file, parse_config_text, resolve_instance
from src.curve import INSTANCES
from src.errors import InvalidInstanceError


class TestParseConfigText:
    """Test cases for parsing instance files."""

    def test_flat_lines(self):
        text = "# instance A\nlambda = -3\nt=3  # base point\n\nnu1 = 1/3\n"
        assert parse_config_text(text) == {"lambda": "-3", "t": "3", "nu1": "1/3"}

    def test_yaml_mapping(self):
        assert parse_config_text("lambda: -3\nnu2: 1/5\n") == {"lambda": "-3", "nu2": "1/5"}

    def test_json_mapping(self):
        assert parse_config_text('{"t": 3, "r": 6}') == {"t": "3", "r": "6"}

    def test_empty(self):
        assert parse_config_text("") == {}
        assert parse_config_text("# nothing\n") == {}

    def test_unknown_key(self):
        with pytest.raises(ValueError, match="Unknown keys in demo.conf: mu"):
            parse_config_text("mu = 1", "demo.conf")

    def test_not_a_mapping(self):
        with pytest.raises(ValueError, match="must hold a mapping"):
            parse_config_text("- 1\n- 2\n")

    def test_invalid_yaml(self):
        with pytest.raises(ValueError, match="Parse config file"):
            parse_config_text("lambda: [1, 2\n")


class TestLoadConfigFile:
    """Test cases for reading instance files from disk."""

    def test_reads_file(self, tmp_path):
        path = tmp_path / "instance.conf"
        path.write_text("lambda=-3\nt=3\nr=6\n", encoding="utf-8")
        assert load_config_file(path) == {"lambda": "-3", "t": "3", "r": "6"}

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValueError, match="Cannot read config file"):
            load_config_file(tmp_path / "missing.conf")


class TestResolveInstance:
    """Test cases for the preset, file and flag layers."""

    def test_default_preset(self):
        assert resolve_instance() == INSTANCES["A"]

    @pytest.mark.parametrize("name", ["A", "B", "C"])
    def test_presets(self, name):
        assert resolve_instance(name) == INSTANCES[name]

    def test_unknown_preset(self):
        with pytest.raises(InvalidInstanceError, match="Unknown instance preset"):
            resolve_instance("Z")

    def test_exponent_override_keeps_r(self):
        inst = resolve_instance("A", {}, {"nu1": Fraction(1, 7)})
        assert inst.nu1 == Fraction(1, 7)
        assert inst.r == 6

    def test_new_base_point_recomputes_r(self):
        inst = resolve_instance("A", {"t": "-1"})
        assert (inst.t, inst.r) == (-1, 2)
        assert inst.nu2 == Fraction(1, 5)

    def test_flags_win_over_file(self):
        inst = resolve_instance("A", {"nu1": "1/7"}, {"nu1": Fraction(2, 7), "t": None})
        assert inst.nu1 == Fraction(2, 7)
        assert inst.t == 3

    def test_not_a_square(self):
        with pytest.raises(InvalidInstanceError, match="not a rational square"):
            resolve_instance("A", {"t": "4"})

    def test_inconsistent_r(self):
        with pytest.raises(InvalidInstanceError):
            resolve_instance("A", {"r": "5"})

    def test_invalid_lambda(self):
        with pytest.raises(InvalidInstanceError):
            resolve_instance("A", {"lambda": "1", "r": "6"})
