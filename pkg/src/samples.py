"""Deterministic rational samples driven by the published seed list."""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, Optional, Tuple

import yaml

logger = logging.getLogger(__name__)

SEEDS_PATH = Path(__file__).parent / "data" / "samples.yaml"


@dataclass(frozen=True)
class SuiteSeed:
    seed: int
    count: int
    quick: int


@dataclass
class RationalSampler:
    """Draws small rationals p/q from a seeded generator."""

    # Tries before a filtered draw gives up
    MAX_TRIES = 1000

    seed: int
    numerator_bound: int = 12
    denominator_bound: int = 7
    _random: random.Random = field(init=False, repr=False)

    def __post_init__(self):
        self._random = random.Random(self.seed)

    def rational(self, nonzero: bool = False) -> Fraction:
        while True:
            value = Fraction(
                self._random.randint(-self.numerator_bound, self.numerator_bound),
                self._random.randint(1, self.denominator_bound),
            )
            if value or not nonzero:
                return value

    def avoiding(self, excluded: Iterable[Any]) -> Fraction:
        """A rational outside ``excluded``."""
        banned = set(Fraction(v) for v in excluded)
        for _ in range(self.MAX_TRIES):
            value = self.rational()
            if value not in banned:
                return value
        raise RuntimeError(f"Sampler {self.seed} could not avoid {sorted(banned)}")

    def point(self, dimension: int, predicate: Optional[Callable[[Tuple[Fraction, ...]], bool]] = None):
        """A point of the given dimension satisfying ``predicate``."""
        for _ in range(self.MAX_TRIES):
            candidate = tuple(self.rational() for _ in range(dimension))
            if predicate is None or predicate(candidate):
                return candidate
        raise RuntimeError(f"Sampler {self.seed} found no admissible {dimension}-point in {self.MAX_TRIES} tries")


@lru_cache(maxsize=None)
def _load(path: Path) -> Dict[str, Any]:
    try:
        with path.open("r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except (yaml.YAMLError, IOError) as e:
        raise ValueError(f"Cannot read sample seeds from {path}: {e}")
    if not isinstance(data, dict) or not isinstance(data.get("suites"), dict):
        raise ValueError(f"Sample seed file {path} has no 'suites' mapping")
    return data


def load_seeds(path: Path = SEEDS_PATH) -> Dict[str, SuiteSeed]:
    data = _load(path)
    return {
        name: SuiteSeed(int(entry["seed"]), int(entry["count"]), int(entry["quick"]))
        for name, entry in data["suites"].items()
    }


def sample_count(suite: str, quick: bool = False, path: Path = SEEDS_PATH) -> int:
    seeds = load_seeds(path)[suite]
    return seeds.quick if quick else seeds.count


def sampler_for(suite: str, path: Path = SEEDS_PATH) -> RationalSampler:
    """A fresh sampler for a suite; equal calls yield equal draws."""
    data = _load(path)
    seeds = load_seeds(path)
    if suite not in seeds:
        raise ValueError(f"No published seed for suite {suite!r}")
    logger.debug(f"Sampler for {suite}: seed {seeds[suite].seed}")
    return RationalSampler(
        seeds[suite].seed,
        int(data.get("numerator_bound", 12)),
        int(data.get("denominator_bound", 7)),
    )
