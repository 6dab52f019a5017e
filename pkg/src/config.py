"""Module for loading curve instances and run settings from files and command-line values."""

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import yaml

from .curve import INSTANCES, CurveInstance
from .errors import InvalidInstanceError

logger = logging.getLogger(__name__)

INSTANCE_KEYS = ("lambda", "t", "r", "nu1", "nu2")
DEFAULT_PRESET = "A"

_FLAT_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*?)\s*$")


@dataclass
class RunConfig:
    """Everything one CLI invocation needs."""

    instance: CurveInstance
    command: str
    arguments: Dict[str, Any] = field(default_factory=dict)
    output: Optional[Path] = None
    verbose: bool = False
    debug: bool = False


def _parse_flat(text: str) -> Optional[Dict[str, str]]:
    """Parse ``key=value`` lines; None when some line is not of that form."""
    values = {}
    for line in text.splitlines():
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        match = _FLAT_LINE.match(stripped)
        if not match:
            return None
        values[match.group(1)] = match.group(2)
    return values


def parse_config_text(text: str, source: str = "<config>") -> Dict[str, Any]:
    """Parse a flat ``key=value`` file, falling back to a YAML (or JSON) mapping.

    Raises:
        ValueError: If the text is neither form or holds unknown keys
    """
    values: Any = _parse_flat(text)
    if values is None:
        try:
            values = yaml.safe_load(text)
        except yaml.YAMLError as e:
            raise ValueError(f"Parse config file {source}: {e}")
    if values is None:
        values = {}
    if not isinstance(values, dict):
        raise ValueError(f"Config file {source} must hold a mapping, got {type(values).__name__}")

    unknown = sorted(set(values) - set(INSTANCE_KEYS))
    if unknown:
        raise ValueError(f"Unknown keys in {source}: {', '.join(unknown)} (allowed: {', '.join(INSTANCE_KEYS)})")
    return {key: str(value) for key, value in values.items()}


def load_config_file(path: Path) -> Dict[str, Any]:
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ValueError(f"Cannot read config file {path}: {e}")
    return parse_config_text(text, str(path))


def resolve_instance(
    preset: Optional[str] = None,
    file_values: Optional[Mapping[str, Any]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> CurveInstance:
    """Merge a preset, config-file values and command-line overrides, in increasing precedence.

    When lambda or t changes without an explicit r, r is recomputed from r^2 = f(t).

    Raises:
        InvalidInstanceError: For an unknown preset or parameters violating the instance constraints
    """
    name = preset or DEFAULT_PRESET
    if name not in INSTANCES:
        raise InvalidInstanceError(f"Unknown instance preset {name!r} (choose from {', '.join(sorted(INSTANCES))})")
    base = INSTANCES[name].to_record()

    supplied: Dict[str, Any] = {}
    for layer in (file_values or {}, overrides or {}):
        supplied.update({key: value for key, value in layer.items() if value is not None})
    merged = {**base, **supplied}
    if ("lambda" in supplied or "t" in supplied) and "r" not in supplied:
        merged["r"] = None

    logger.debug(f"Instance from preset {name} with {sorted(supplied)} supplied")
    return CurveInstance.from_parameters(merged["lambda"], merged["t"], merged["nu1"], merged["nu2"], merged["r"])
