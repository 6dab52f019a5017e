"""Regression runs of the quick selftest on the instance files under tests/regression."""

import json
from pathlib import Path
from unittest.mock import patch

import pytest

from src.cli import main
from src.config import load_config_file, resolve_instance
from src.report import compare_records

# Paths are based on run_tests.py being run in the main directory
REGRESSION_DIR = Path("tests/regression")
INSTANCE_FILES = sorted(REGRESSION_DIR.glob("*.conf"))
QUICK_SUITES = ("family", "app", "determinant", "conservation", "incidence")


def run_to_file(config: Path, output: Path) -> int:
    argv = ["elliptic-logconn", "--config", str(config), "--output", str(output), "selftest", "--quick"]
    for suite in QUICK_SUITES:
        argv.extend(["--suite", suite])
    with patch("sys.argv", argv):
        return main()


class TestRegression:
    """Test cases for reproducible selftest reports."""

    def test_instance_files_present(self):
        assert len(INSTANCE_FILES) >= 2

    @pytest.mark.parametrize("config", INSTANCE_FILES, ids=lambda path: path.name)
    def test_reports_are_byte_identical(self, config, tmp_path):
        first, second = tmp_path / "first.json", tmp_path / "second.json"
        assert run_to_file(config, first) == run_to_file(config, second)
        assert first.read_bytes() == second.read_bytes()

        record = json.loads(first.read_text(encoding="utf-8"))
        assert record["data"]["suites"] == list(QUICK_SUITES)
        assert compare_records(record["instance"], resolve_instance(None, load_config_file(config)).to_record()) == []

    def test_worked_instance_passes(self, tmp_path):
        output = tmp_path / "report.json"
        assert run_to_file(REGRESSION_DIR / "instance_a.conf", output) == 0
        record = json.loads(output.read_text(encoding="utf-8"))
        assert record["passed"] is True
        assert "determinant.worked[z=(1,2)]" in {check["name"] for check in record["checks"]}
