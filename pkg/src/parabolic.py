"""Flatness, indecomposability and stability decisions for rank-2 parabolic bundles with two parabolic points."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .connection import Direction
from .curve import (
    W_INF,
    CurveInstance,
    CurvePoint,
    DivisorClass,
    class_add,
    class_mul,
    class_neg,
    h0,
    point_class,
)
from .errors import PreconditionError
from .exact import format_rational, parse_rational

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


class FlagPosition(Enum):
    IN_L = "InL"
    IN_M = "InM"
    GENERIC = "Generic"


class FlatVerdict(Enum):
    FLAT = "Flat"
    NOT_FLAT = "NotFlat"
    GENERICALLY_FLAT = "GenericallyFlat"


class Decomposability(Enum):
    DECOMPOSABLE = "Decomposable"
    INDECOMPOSABLE = "Indecomposable"
    GENERICALLY_INDECOMPOSABLE = "GenericallyIndecomposable"


class Stability(Enum):
    STABLE = "Stable"
    STRICTLY_SEMISTABLE = "StrictlySemistable"
    UNSTABLE = "Unstable"


class Chamber(Enum):
    LESS = "X<"
    GREATER = "X>"
    WALL = "wall"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class Flag:
    """Position of the parabolic direction over ``point`` relative to a splitting L + M."""

    point: CurvePoint
    position: FlagPosition
    hint: Optional[Direction] = None


@dataclass(frozen=True)
class ExponentSet:
    """Local exponents (plus, minus) per parabolic point."""

    values: Tuple[Tuple[CurvePoint, Fraction, Fraction], ...]

    def __post_init__(self):
        ordered = tuple(
            sorted(
                ((p, parse_rational(plus), parse_rational(minus)) for p, plus, minus in self.values),
                key=lambda item: item[0].sort_key(),
            )
        )
        object.__setattr__(self, "values", ordered)

    @property
    def points(self) -> Tuple[CurvePoint, ...]:
        return tuple(p for p, _, _ in self.values)

    def at(self, point: CurvePoint) -> Tuple[Fraction, Fraction]:
        for p, plus, minus in self.values:
            if p == point:
                return plus, minus
        raise PreconditionError(f"No exponents at {point}")

    def total(self) -> Fraction:
        return sum((plus + minus for _, plus, minus in self.values), Fraction(0))

    def differences(self) -> Tuple[Fraction, ...]:
        return tuple(plus - minus for _, plus, minus in self.values)

    def to_record(self) -> List[Dict[str, str]]:
        return [
            {"point": str(p), "plus": format_rational(plus), "minus": format_rational(minus)}
            for p, plus, minus in self.values
        ]


@dataclass(frozen=True)
class HalfClass:
    """A square root of ``square``, named without materializing its point; ``index`` tells the four roots apart."""

    square: DivisorClass
    index: int = 1

    def __post_init__(self):
        if self.square.degree % 2:
            raise PreconditionError(f"Class {self.square} of odd degree has no square root")

    @property
    def degree(self) -> int:
        return self.square.degree // 2

    def __str__(self) -> str:
        return f"sqrt#{self.index}{self.square}"


LineClass = Union[DivisorClass, HalfClass]


def doubled(inst: CurveInstance, value: LineClass) -> DivisorClass:
    return value.square if isinstance(value, HalfClass) else class_mul(inst, 2, value)


@dataclass(frozen=True)
class Decomposable:
    """(L, q) + (M, r) with flags placing each parabolic direction."""

    L: LineClass
    M: LineClass
    flags: Tuple[Flag, ...]
    det: Optional[DivisorClass] = None

    def __post_init__(self):
        points = [flag.point for flag in self.flags]
        if len(set(points)) != len(points):
            raise PreconditionError("Two flags over the same parabolic point")
        if self.det is not None and self.det.degree != self.L.degree + self.M.degree:
            raise PreconditionError(
                f"deg L + deg M = {self.L.degree + self.M.degree} differs from deg det = {self.det.degree}"
            )

    @property
    def degree(self) -> int:
        return self.L.degree + self.M.degree

    def flag_at(self, point: CurvePoint) -> Flag:
        for flag in self.flags:
            if flag.point == point:
                return flag
        raise PreconditionError(f"No flag over {point}")

    def swapped(self) -> "Decomposable":
        """The same bundle with the roles of L and M exchanged."""
        exchange = {FlagPosition.IN_L: FlagPosition.IN_M, FlagPosition.IN_M: FlagPosition.IN_L}
        flags = tuple(Flag(f.point, exchange.get(f.position, f.position), f.hint) for f in self.flags)
        return Decomposable(self.M, self.L, flags, self.det)


@dataclass(frozen=True)
class IndecomposableE1:
    """The non-trivial extension of O(w_inf) by O with directions p1, p2 (degree one)."""

    p1: Optional[Direction] = None
    p2: Optional[Direction] = None

    @property
    def degree(self) -> int:
        return 1


@dataclass(frozen=True)
class E0AllOnMax:
    """The non-trivial extension of O by O with every parabolic on the maximal subbundle (degree zero)."""

    points: Tuple[CurvePoint, ...] = ()

    @property
    def degree(self) -> int:
        return 0


ParabolicBundleDesc = Union[Decomposable, IndecomposableE1, E0AllOnMax]


@dataclass(frozen=True)
class WeightVector:
    mu1: Fraction
    mu2: Fraction

    def __post_init__(self):
        for name in ("mu1", "mu2"):
            value = parse_rational(getattr(self, name))
            if not 0 <= value <= 1:
                raise PreconditionError(f"Weight {name} = {value} is outside [0, 1]")
            object.__setattr__(self, name, value)

    def as_tuple(self) -> Tuple[Fraction, Fraction]:
        return (self.mu1, self.mu2)


@dataclass
class GenericityReport:
    odd_free: bool
    sign_sums_nonintegral: bool
    distinct: Dict[str, bool] = field(default_factory=dict)

    @property
    def generic(self) -> bool:
        return self.odd_free and self.sign_sums_nonintegral and all(self.distinct.values())

    def to_record(self) -> Dict[str, Any]:
        return {
            "generic": self.generic,
            "odd_free": self.odd_free,
            "sign_sums_nonintegral": self.sign_sums_nonintegral,
            "distinct": dict(self.distinct),
        }


@dataclass(frozen=True)
class NotSimpleType:
    """Indecomposable, not simple bundle L + L^-1(w_inf) with L^2 = class(w_inf - t_k)."""

    k: int
    i: int
    L: HalfClass

    @property
    def flags(self) -> Tuple[FlagPosition, FlagPosition]:
        # p_k generic, the other parabolic on L^-1(w_inf)
        return (FlagPosition.GENERIC, FlagPosition.IN_M) if self.k == 1 else (FlagPosition.IN_M, FlagPosition.GENERIC)


def exponents_from_nu(inst: CurveInstance, nu1: Any = None, nu2: Any = None) -> ExponentSet:
    """nu_1^+- = +-nu1/2 - 1/2 at t1 and nu_2^+- = +-nu2/2 at t2, so that 1 + sum = 0."""
    nu1 = inst.nu1 if nu1 is None else parse_rational(nu1)
    nu2 = inst.nu2 if nu2 is None else parse_rational(nu2)
    return ExponentSet(((inst.t1, nu1 / 2 - HALF, -nu1 / 2 - HALF), (inst.t2, nu2 / 2, -nu2 / 2)))


def genericity(nu: ExponentSet) -> GenericityReport:
    """Oddness of nu1 +- nu2, integrality of every sign sum, and distinctness of the two exponents per point."""
    diffs = nu.differences()
    odd_free = True
    if len(diffs) == 2:
        for combination in (diffs[0] + diffs[1], diffs[0] - diffs[1]):
            if combination.denominator == 1 and combination.numerator % 2:
                odd_free = False

    sums = [Fraction(0)]
    for _, plus, minus in nu.values:
        sums = [s + plus for s in sums] + [s + minus for s in sums]
    nonintegral = all(s.denominator != 1 for s in sums)

    distinct = {str(p): plus != minus for p, plus, minus in nu.values}
    return GenericityReport(odd_free, nonintegral, distinct)


def _summand_degree(desc: Decomposable, summand: str, nu: ExponentSet, generic_as: Optional[FlagPosition]) -> Fraction:
    if summand not in ("L", "M"):
        raise PreconditionError(f"Unknown summand {summand!r}")
    inside = FlagPosition.IN_L if summand == "L" else FlagPosition.IN_M
    line = desc.L if summand == "L" else desc.M
    if set(nu.points) != set(flag.point for flag in desc.flags):
        raise PreconditionError("Flags and exponents refer to different parabolic points")
    total = Fraction(line.degree)
    for point, plus, minus in nu.values:
        position = desc.flag_at(point).position
        if position is FlagPosition.GENERIC:
            if generic_as is None:
                raise PreconditionError(f"Parabolic over {point} lies in no summand")
            position = generic_as
        total += plus if position is inside else minus
    return total


def parabolic_degree(desc: Decomposable, summand: str, nu: ExponentSet) -> Fraction:
    """deg(summand) plus nu^+ over the parabolics in it and nu^- over the others.

    Raises:
        PreconditionError: If a flag is Generic, or flags and exponents disagree on the points
    """
    return _summand_degree(desc, summand, nu, None)


def indecomposable_n2(
    inst: CurveInstance, L: LineClass, det: DivisorClass, flags: Sequence[Flag]
) -> Tuple[Decomposability, CurvePoint]:
    """Decide decomposability of (L + L^-1(det), p) for deg L = 0 and two parabolics.

    Every embedding of L agrees with the given one exactly over t_base, the point with
    class(t_base) = det - 2L. Returns the verdict and t_base.

    Raises:
        PreconditionError: If deg L != 0, deg det != 1, or the flags are not over t1 and t2
    """
    if L.degree != 0 or det.degree != 1:
        raise PreconditionError(f"Expected deg L = 0 and deg det = 1, got {L.degree} and {det.degree}")
    by_point = {flag.point: flag.position for flag in flags}
    if set(by_point) != set(inst.poles) or len(flags) != 2:
        raise PreconditionError("Flags must sit over t1 and t2")
    t_base = class_add(inst, det, class_neg(inst, doubled(inst, L))).sum
    logger.debug(f"Embeddings of {L} pass through a common point over {t_base}")

    generic = [p for p in inst.poles if by_point[p] is FlagPosition.GENERIC]
    if not generic:
        return Decomposability.DECOMPOSABLE, t_base
    if t_base in generic:
        # no embedding of L reaches a generic direction over the base point
        return Decomposability.INDECOMPOSABLE, t_base
    if len(generic) == 2:
        return Decomposability.GENERICALLY_INDECOMPOSABLE, t_base

    (generic_point,) = generic
    other = inst.t2 if generic_point == inst.t1 else inst.t1
    if by_point[other] is FlagPosition.IN_M or other == t_base:
        return Decomposability.DECOMPOSABLE, t_base
    return Decomposability.INDECOMPOSABLE, t_base


def _flags_can_move(desc: Decomposable) -> bool:
    """Whether some splitting compatible with the parabolics assigns a flag to the other summand.

    With deg L != deg M, or L and M non-isomorphic of equal degree, a parabolic in one summand stays in
    that summand for every compatible splitting. For L = M every direction lies on some summand.
    """
    if desc.L.degree != desc.M.degree:
        return False
    if isinstance(desc.L, HalfClass) or isinstance(desc.M, HalfClass):
        return True
    return desc.L.sum == desc.M.sum


def nu_flat(desc: ParabolicBundleDesc, nu: ExponentSet, inst: Optional[CurveInstance] = None) -> FlatVerdict:
    """Flatness by the criterion that every direct summand has parabolic degree zero.

    Generic flags of a two-point bundle with a degree-zero summand defer to ``indecomposable_n2`` when
    ``inst`` is given.
    """
    if desc.degree + nu.total() != 0:
        return FlatVerdict.NOT_FLAT
    if isinstance(desc, (IndecomposableE1, E0AllOnMax)):
        return FlatVerdict.FLAT

    if desc.L.degree != 0 and desc.M.degree == 0:
        desc = desc.swapped()
    has_generic = any(flag.position is FlagPosition.GENERIC for flag in desc.flags)
    if not has_generic:
        if parabolic_degree(desc, "L", nu) or parabolic_degree(desc, "M", nu):
            return FlatVerdict.NOT_FLAT
        return FlatVerdict.GENERICALLY_FLAT if _flags_can_move(desc) else FlatVerdict.FLAT

    if inst is None or desc.L.degree != 0 or len(desc.flags) != 2:
        return FlatVerdict.GENERICALLY_FLAT
    det = desc.det or DivisorClass(1, W_INF)
    verdict, _ = indecomposable_n2(inst, desc.L, det, desc.flags)
    if verdict is Decomposability.INDECOMPOSABLE:
        return FlatVerdict.FLAT
    if verdict is Decomposability.GENERICALLY_INDECOMPOSABLE:
        return FlatVerdict.GENERICALLY_FLAT
    if _summand_degree(desc, "L", nu, FlagPosition.IN_L) or _summand_degree(desc, "M", nu, FlagPosition.IN_L):
        return FlatVerdict.NOT_FLAT
    return FlatVerdict.GENERICALLY_FLAT


def not_simple_types(inst: CurveInstance) -> List[NotSimpleType]:
    """The eight bundles E_{i,k}: four square roots of class(w_inf - t_k) for k = 1, 2."""
    types = []
    for k, point in enumerate(inst.poles, start=1):
        square = class_add(inst, point_class(W_INF), class_neg(inst, point_class(point)))
        types.extend(NotSimpleType(k, i, HalfClass(square, i)) for i in range(1, 5))
    return types


def decomposable_by_degree(n: int, k: int) -> bool:
    """Whether every (L + L^-1(w), p) with deg L = k and n parabolics is decomposable.

    Indecomposable bundles need -n + 1 < 2k < n + 1.
    """
    return not (-n + 1 < 2 * k < n + 1)


def embedding_family_dimension(inst: CurveInstance, k: int) -> int:
    """Dimension of the family of embeddings L -> L + L^-1(w_inf) for deg L = k, from h0(L^-2(w_inf)) + 1 - 1."""
    return h0(inst, DivisorClass(1 - 2 * k, W_INF))


def stab_index(deg_e: int, deg_l: int, on_l: Sequence[bool], mu: WeightVector) -> Fraction:
    """deg E - 2 deg L + sum of mu_k over parabolics off L - sum of mu_k over parabolics on L."""
    total = Fraction(deg_e - 2 * deg_l)
    for inside, weight in zip(on_l, mu.as_tuple()):
        total += -weight if inside else weight
    return total


def is_mu_stable(deg_e: int, subbundles: Iterable[Tuple[int, Sequence[bool]]], mu: WeightVector) -> Stability:
    """Stability from the indices of the given rank-one subbundles."""
    indices = [stab_index(deg_e, deg_l, on_l, mu) for deg_l, on_l in subbundles]
    if not indices or min(indices) > 0:
        return Stability.STABLE
    if min(indices) == 0:
        return Stability.STRICTLY_SEMISTABLE
    return Stability.UNSTABLE


def chamber(mu: WeightVector) -> Chamber:
    total = mu.mu1 + mu.mu2
    if on_wall(mu):
        return Chamber.WALL
    if 0 < total < 1:
        return Chamber.LESS
    if 1 < total < 2:
        return Chamber.GREATER
    return Chamber.DEGENERATE


def on_wall(mu: WeightVector) -> bool:
    return mu.mu1 + mu.mu2 == 1 and mu.mu1 != 0 and mu.mu2 != 0


def elm_weight_transform(
    deg_e: int, deg_l: int, on_l: Sequence[bool], mu: WeightVector, k: int
) -> Tuple[int, int, Tuple[bool, ...], WeightVector]:
    """Effect of elm- at the k-th parabolic point (1-based) on a subbundle and the weights.

    deg E drops by one and mu_k becomes 1 - mu_k. A subbundle through p_k is kept and no longer contains the
    new parabolic; any other subbundle L becomes L(-t_k), which does.
    """
    index = k - 1
    inside = list(on_l)
    weights = list(mu.as_tuple())
    new_deg_l = deg_l if inside[index] else deg_l - 1
    inside[index] = not inside[index]
    weights[index] = 1 - weights[index]
    return deg_e - 1, new_deg_l, tuple(inside), WeightVector(*weights)


def fiber_dimension(desc: ParabolicBundleDesc, nu: ExponentSet) -> int:
    """Expected dimension of the space of nu-flat connections over an indecomposable bundle.

    The value is the known dimension of that affine plane, returned once the preconditions hold; nothing is
    computed from the bundle. The family over U0 realizes the two directions through theta1 and theta2.

    Raises:
        PreconditionError: For a decomposable description or coinciding exponents
    """
    if isinstance(desc, Decomposable):
        raise PreconditionError("Fiber dimension is recorded for indecomposable bundles only")
    if any(plus == minus for _, plus, minus in nu.values):
        raise PreconditionError("Fiber dimension needs nu_k^+ != nu_k^- at every point")
    return 2


def _class_from_record(record: Any) -> LineClass:
    if not isinstance(record, dict):
        raise PreconditionError(f"Line bundle class must be a mapping, got {record!r}")
    if "square" in record:
        return HalfClass(_class_from_record(record["square"]), int(record.get("index", 1)))
    return DivisorClass(int(record.get("degree", 0)), CurvePoint.parse(str(record.get("sum", "inf"))))


def desc_from_record(inst: CurveInstance, record: Dict[str, Any]) -> ParabolicBundleDesc:
    """Bundle description from a mapping such as ``{"kind": "Decomposable", "L": {...}, "flags": {"t1": "InL"}}``.

    Raises:
        PreconditionError: For an unknown kind, flag position or point name
    """
    kind = record.get("kind")
    if kind == "IndecomposableE1":
        directions = [Direction.parse(record[key]) if record.get(key) else None for key in ("p1", "p2")]
        return IndecomposableE1(*directions)
    if kind == "E0AllOnMax":
        return E0AllOnMax(tuple(inst.poles))
    if kind != "Decomposable":
        raise PreconditionError(f"Unknown bundle kind {kind!r}")

    flags = []
    for name, position in (record.get("flags") or {}).items():
        point = inst.named_point(name)
        try:
            flags.append(Flag(point, FlagPosition(position)))
        except ValueError:
            raise PreconditionError(f"Unknown flag position {position!r} over {name}")
    det = _class_from_record(record["det"]) if "det" in record else None
    line, other = _class_from_record(record.get("L", {})), _class_from_record(record.get("M", {}))
    return Decomposable(line, other, tuple(flags), det)


def exponents_from_record(inst: CurveInstance, record: Optional[Dict[str, Any]]) -> ExponentSet:
    """Exponents given as ``{"t1": ["plus", "minus"], ...}``; without a record they come from the instance's nu."""
    if not record:
        return exponents_from_nu(inst)
    values = []
    for name, pair in record.items():
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise PreconditionError(f"Exponents over {name} must be a [plus, minus] pair, got {pair!r}")
        values.append((inst.named_point(name), parse_rational(pair[0]), parse_rational(pair[1])))
    return ExponentSet(tuple(values))


def flatness_report_data(inst: CurveInstance, desc: ParabolicBundleDesc, nu: ExponentSet) -> Dict[str, Any]:
    """Verdict and supporting quantities for the CLI."""
    data: Dict[str, Any] = {
        "kind": type(desc).__name__,
        "degree": desc.degree,
        "fuchs": desc.degree + nu.total() == 0,
        "genericity": genericity(nu).to_record(),
        "verdict": nu_flat(desc, nu, inst).value,
        "exponents": nu.to_record(),
    }
    if isinstance(desc, Decomposable) and all(f.position is not FlagPosition.GENERIC for f in desc.flags):
        data["parabolic_degrees"] = {
            summand: format_rational(parabolic_degree(desc, summand, nu)) for summand in ("L", "M")
        }
    return data
