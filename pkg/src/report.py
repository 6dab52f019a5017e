"""Module for collecting verification checks and comparing exact records."""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Union

from deepdiff import DeepDiff

from .errors import LogConnError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"


@dataclass(frozen=True)
class Check:
    """Outcome of one named exact check."""

    name: str
    passed: bool
    detail: str = ""

    def to_record(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class Report:
    """Ordered list of checks plus free-form data produced by one command."""

    command: str
    checks: List[Check] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[Check]:
        return [check for check in self.checks if not check.passed]

    def add(self, name: str, passed: bool, detail: str = "") -> Check:
        check = Check(name, bool(passed), "" if passed else detail)
        self.checks.append(check)
        if not check.passed:
            logger.debug(f"Check {name} failed: {detail}")
        return check

    def run(self, name: str, predicate: Callable[[], Union[bool, tuple]]) -> Check:
        """Record the outcome of ``predicate``; any error it raises becomes a failed check.

        The predicate returns a bool or a ``(bool, detail)`` pair.
        """
        try:
            outcome = predicate()
        except LogConnError as e:
            return self.add(name, False, f"{type(e).__name__}: {e}")
        except Exception as e:
            logger.warning(f"Check {name} raised {type(e).__name__}", exc_info=True)
            return self.add(name, False, f"{type(e).__name__}: {e}")
        if isinstance(outcome, tuple):
            return self.add(name, *outcome)
        return self.add(name, outcome)

    def merge(self, other: "Report", prefix: str = "") -> None:
        """Append another report's checks, optionally namespaced by ``prefix``."""
        for check in other.checks:
            name = f"{prefix}.{check.name}" if prefix else check.name
            self.checks.append(Check(name, check.passed, check.detail))
        if other.data:
            self.data[prefix or other.command] = other.data

    def to_record(self, instance: Optional[Dict[str, str]] = None) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "instance": instance or {},
            "passed": self.passed,
            "checks": [check.to_record() for check in self.checks],
            "data": self.data,
        }

    def to_json(self, instance: Optional[Dict[str, str]] = None) -> str:
        return json.dumps(self.to_record(instance), indent=2, sort_keys=True)

    def summary(self) -> str:
        failures = self.failures()
        status = "PASSED" if not failures else "FAILED"
        lines = [f"{self.command}: {status} ({len(self.checks) - len(failures)}/{len(self.checks)} checks)"]
        lines.extend(f"  - {check.name}: {check.detail}" for check in failures)
        return "\n".join(lines)


class RecordComparer:
    """Compares exact records (nested dicts and lists of strings) and lists their differences."""

    def _clean_diff_path(self, path: str) -> str:
        """Clean up DeepDiff path to be more user-friendly."""
        # root['matrix'][1] -> matrix[1], root[0] -> 0
        if not path.startswith("root"):
            return path
        if path.startswith("root['") or path.startswith('root["'):
            closing = "']" if path.startswith("root['") else '"]'
            end_quote = path.find(closing)
            if end_quote > 6:
                return path[6:end_quote] + path[end_quote + 2 :]
            return path[4:]
        if path.startswith("root[") and path.endswith("]"):
            return path[5:-1]
        if path.startswith("root."):
            return path[5:]
        return path[4:]

    def differences(self, expected: Any, actual: Any) -> List[str]:
        """Human-readable list of differences between two records; empty when they agree."""
        diff = DeepDiff(expected, actual)
        output = []
        for change_type, changes in diff.items():
            if change_type == "values_changed":
                for path, change in changes.items():
                    output.append(
                        f"{self._clean_diff_path(path)}: '{change.get('old_value')}' -> '{change.get('new_value')}'"
                    )
            elif change_type == "type_changes":
                for path, change in changes.items():
                    output.append(
                        f"{self._clean_diff_path(path)}: type changed from "
                        f"{change.get('old_type', 'Unknown')} to {change.get('new_type', 'Unknown')}"
                    )
            elif change_type in ("dictionary_item_added", "iterable_item_added"):
                for path in changes:
                    output.append(f"Added: {self._clean_diff_path(path)}")
            elif change_type in ("dictionary_item_removed", "iterable_item_removed"):
                for path in changes:
                    output.append(f"Removed: {self._clean_diff_path(path)}")
            else:
                output.append(f"{change_type}: {changes}")
        return output


_comparer = RecordComparer()


def compare_records(expected: Any, actual: Any) -> List[str]:
    return _comparer.differences(expected, actual)
