"""Rank-2 logarithmic connections: matrices, residues, exponents, gauge changes and elementary transformations."""

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import singledispatch
from typing import Any, Callable, Dict, Iterable, Optional, Tuple

from .curve import (
    TRIVIAL_CLASS,
    CurveElement,
    CurveInstance,
    CurvePoint,
    Divisor,
    DivisorClass,
    class_add,
    class_neg,
    local_series,
    point_class,
    poles_of,
)
from .errors import (
    DomainError,
    EigenvaluesOutsideFieldError,
    NonGenericResidueError,
    NotLogarithmicError,
    PreconditionError,
)
from .exact import QQ, Field, format_rational, parse_rational, rational_sqrt

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class Mat2:
    """2x2 matrix [[a, b], [c, d]] over any ring that supports the arithmetic operators."""

    a: Any
    b: Any
    c: Any
    d: Any

    @classmethod
    def identity(cls, one: Any = Fraction(1), zero: Any = Fraction(0)) -> "Mat2":
        return cls(one, zero, zero, one)

    @classmethod
    def diagonal(cls, first: Any, second: Any, zero: Any = Fraction(0)) -> "Mat2":
        return cls(first, zero, zero, second)

    def entries(self) -> Tuple[Any, Any, Any, Any]:
        return (self.a, self.b, self.c, self.d)

    def map(self, function: Callable[[Any], Any]) -> "Mat2":
        return Mat2(*(function(e) for e in self.entries()))

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d)

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d)

    def __neg__(self) -> "Mat2":
        return self.map(lambda e: -e)

    def __mul__(self, other: Any) -> "Mat2":
        if isinstance(other, Mat2):
            return Mat2(
                self.a * other.a + self.b * other.c,
                self.a * other.b + self.b * other.d,
                self.c * other.a + self.d * other.c,
                self.c * other.b + self.d * other.d,
            )
        return self.map(lambda e: e * other)

    def __rmul__(self, other: Any) -> "Mat2":
        return self.map(lambda e: other * e)

    def trace(self) -> Any:
        return self.a + self.d

    def det(self) -> Any:
        return self.a * self.d - self.b * self.c

    def adjugate(self) -> "Mat2":
        return Mat2(self.d, -self.b, -self.c, self.a)

    def inverse(self) -> "Mat2":
        det = self.det()
        if not det:
            raise DomainError("Singular matrix")
        inverse_det = 1 / det
        return self.adjugate().map(lambda e: e * inverse_det)

    def apply(self, vector: Tuple[Any, Any]) -> Tuple[Any, Any]:
        return (self.a * vector[0] + self.b * vector[1], self.c * vector[0] + self.d * vector[1])

    def is_zero(self) -> bool:
        return not any(self.entries())


@dataclass(frozen=True)
class Direction:
    """Point of P^1, normalized to (1:s) or (0:1)."""

    u: Fraction
    v: Fraction

    def __post_init__(self):
        u, v = parse_rational(self.u), parse_rational(self.v)
        if u == 0 and v == 0:
            raise DomainError("(0:0) is not a direction")
        if u == 0:
            u, v = Fraction(0), Fraction(1)
        else:
            u, v = Fraction(1), v / u
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @classmethod
    def from_slope(cls, slope: Optional[Any]) -> "Direction":
        """(1:slope), with None standing for (0:1)."""
        return cls(0, 1) if slope is None else cls(1, slope)

    @classmethod
    def parse(cls, text: str) -> "Direction":
        literal = text.strip()
        if not (literal.startswith("(") and literal.endswith(")")) or literal.count(":") != 1:
            raise DomainError(f"Not a direction: {text!r}")
        u_text, v_text = literal[1:-1].split(":")
        return cls(parse_rational(u_text), parse_rational(v_text))

    @property
    def slope(self) -> Optional[Fraction]:
        return self.v if self.u else None

    @property
    def vector(self) -> Tuple[Fraction, Fraction]:
        return (self.u, self.v)

    def __str__(self) -> str:
        return f"({format_rational(self.u)}:{format_rational(self.v)})"


@dataclass(frozen=True)
class ExponentLedger:
    """Local exponents (plus, minus) at each pole, together with the degree and class of the bundle."""

    exponents: Tuple[Tuple[CurvePoint, Fraction, Fraction], ...] = ()
    degree: int = 0
    bundle_class: DivisorClass = TRIVIAL_CLASS

    def __post_init__(self):
        ordered = tuple(
            sorted(
                ((p, parse_rational(plus), parse_rational(minus)) for p, plus, minus in self.exponents),
                key=lambda item: item[0].sort_key(),
            )
        )
        object.__setattr__(self, "exponents", ordered)

    @classmethod
    def of(
        cls, mapping: Dict[CurvePoint, Tuple[Any, Any]], degree: int = 0, bundle_class: DivisorClass = TRIVIAL_CLASS
    ) -> "ExponentLedger":
        return cls(tuple((p, plus, minus) for p, (plus, minus) in mapping.items()), degree, bundle_class)

    def as_mapping(self) -> Dict[CurvePoint, Tuple[Fraction, Fraction]]:
        return {p: (plus, minus) for p, plus, minus in self.exponents}

    def at(self, point: CurvePoint) -> Tuple[Fraction, Fraction]:
        """Exponents at a point; a point off the polar locus carries (0, 0)."""
        return self.as_mapping().get(point, (Fraction(0), Fraction(0)))

    def with_exponents(self, point: CurvePoint, plus: Fraction, minus: Fraction) -> "ExponentLedger":
        mapping = self.as_mapping()
        mapping[point] = (plus, minus)
        return ExponentLedger.of(mapping, self.degree, self.bundle_class)

    def exponent_sum(self) -> Fraction:
        return sum((plus + minus for _, plus, minus in self.exponents), Fraction(0))

    def to_record(self) -> Dict[str, Any]:
        return {
            "degree": self.degree,
            "class": {"degree": self.bundle_class.degree, "sum": str(self.bundle_class.sum)},
            "exponents": [
                {"point": str(p), "plus": format_rational(plus), "minus": format_rational(minus)}
                for p, plus, minus in self.exponents
            ],
        }


@dataclass(frozen=True)
class RankOneConnection:
    """Logarithmic connection on a line bundle, described by its class and residues."""

    cls: DivisorClass
    residues: Tuple[Tuple[CurvePoint, Fraction], ...] = ()


@dataclass(frozen=True)
class LogConnection:
    """Logarithmic connection d_weight * d + A(x) dx/y on a trivialized rank-2 bundle.

    ``polar`` bounds the poles of the entries of A; ``ledger`` records the exponents together with
    the degree and class of the underlying bundle. A ``d_weight`` other than one describes a
    lambda-connection, and zero a Higgs field.
    """

    matrix: Mat2
    polar: Divisor = field(default_factory=Divisor)
    ledger: ExponentLedger = field(default_factory=ExponentLedger)
    d_weight: Fraction = Fraction(1)

    @property
    def coefficient_field(self) -> Field:
        return self.matrix.a.field


@dataclass(frozen=True)
class ResidueData:
    """Coefficients of u^-1 and u^0 in the expansion of A dx/y at a point."""

    point: CurvePoint
    residue: Mat2
    constant: Mat2


def residue_data(inst: CurveInstance, conn: LogConnection, point: CurvePoint) -> ResidueData:
    """Residue and constant term of the connection form at ``point``.

    Raises:
        NotLogarithmicError: If an entry of A dx/y has a pole of order two or more
    """
    zero = conn.coefficient_field.zero
    minus_one, constant = [], []
    for entry in conn.matrix.entries():
        if not entry:
            minus_one.append(zero)
            constant.append(zero)
            continue
        series = local_series(inst, entry, point, 0, form=True)
        if series.valuation is not None and series.valuation < -1:
            raise NotLogarithmicError(f"Pole of order {-series.valuation} at {point}")
        minus_one.append(series.coefficient(-1))
        constant.append(series.coefficient(0))
    return ResidueData(point, Mat2(*minus_one), Mat2(*constant))


def eigen(matrix: Mat2) -> Tuple[Tuple[Fraction, Direction], Tuple[Fraction, Direction]]:
    """Eigenvalues in decreasing order with their eigendirections.

    Raises:
        NonGenericResidueError: If the eigenvalues coincide
        EigenvaluesOutsideFieldError: If they are not rational
    """
    trace, det = matrix.trace(), matrix.det()
    discriminant = trace * trace - 4 * det
    if discriminant == 0:
        raise NonGenericResidueError(f"Repeated eigenvalue {format_rational(trace / 2)}")
    root = rational_sqrt(discriminant)
    if root is None:
        raise EigenvaluesOutsideFieldError(f"Discriminant {format_rational(discriminant)} is not a square")
    high, low = (trace + root) / 2, (trace - root) / 2
    return (high, eigendirection(matrix, high)), (low, eigendirection(matrix, low))


def eigendirection(matrix: Mat2, value: Fraction) -> Direction:
    """Eigendirection of a residue for a simple eigenvalue.

    Raises:
        DomainError: If ``value`` is not an eigenvalue
    """
    shifted = matrix - Mat2.identity() * value
    if shifted.det() != 0:
        raise DomainError(f"{format_rational(value)} is not an eigenvalue")
    if shifted.a or shifted.b:
        return Direction(shifted.b, -shifted.a)
    if shifted.c or shifted.d:
        return Direction(shifted.d, -shifted.c)
    raise NonGenericResidueError(f"Every direction is an eigendirection for {format_rational(value)}")


def wedge(first: Tuple[Any, Any], second: Tuple[Any, Any]) -> Any:
    return first[0] * second[1] - first[1] * second[0]


def is_apparent(data: ResidueData, direction: Direction) -> bool:
    """Whether the pole with this residue data is removable by an elementary transformation at ``direction``."""
    vector = direction.vector
    residual = (data.residue - Mat2.identity() * HALF).apply(vector)
    return not any(residual) and wedge(data.constant.apply(vector), vector) == 0


def polar_of_matrix(inst: CurveInstance, matrix: Mat2) -> Divisor:
    polar = Divisor()
    for entry in matrix.entries():
        if entry:
            polar = polar.union(poles_of(inst, entry))
    return polar


def _as_element(inst: CurveInstance, value: Any, coefficient_field: Field) -> CurveElement:
    if isinstance(value, CurveElement):
        return value
    return inst.element(value, 0, coefficient_field)


def gauge(inst: CurveInstance, conn: LogConnection, transform: Mat2) -> LogConnection:
    """Apply the gauge change A -> G A G^-1 - d_weight * y * G' G^-1.

    The ledger is kept; the polar divisor is recomputed from the new entries.

    Raises:
        DomainError: If det G is the zero function
    """
    coefficient_field = conn.coefficient_field
    g = transform.map(lambda e: _as_element(inst, e, coefficient_field))
    if not g.det():
        raise DomainError("Gauge transformation with zero determinant")
    g_inverse = g.inverse()
    y = inst.y_element(coefficient_field)
    g_prime = g.map(lambda e: e.derivative())
    matrix = g * conn.matrix * g_inverse - (g_prime * g_inverse) * (y * conn.d_weight)
    polar = polar_of_matrix(inst, matrix) if coefficient_field is QQ else conn.polar
    return LogConnection(matrix, polar, conn.ledger, conn.d_weight)


def local_parameter(inst: CurveInstance, point: CurvePoint, coefficient_field: Field = QQ) -> CurveElement:
    """x - x0 at affine points with y0 != 0, y at the finite 2-torsion points."""
    if point.is_infinity:
        raise PreconditionError("Elementary transformations are taken at affine points")
    if point.y == 0:
        return inst.y_element(coefficient_field)
    return inst.x_element(coefficient_field) - point.x


def _frame(direction: Direction) -> Mat2:
    """Constant matrix K sending ``direction`` to (1:0)."""
    if direction.u:
        return Mat2(Fraction(1), Fraction(0), -direction.v, Fraction(1))
    return Mat2(Fraction(0), Fraction(1), Fraction(1), Fraction(0))


def elm_direction(direction: Direction) -> Direction:
    """Parabolic direction left behind by an elementary transformation at ``direction``."""
    return Direction(0, 1) if direction.u else Direction(1, 0)


def elm(inst: CurveInstance, conn: LogConnection, point: CurvePoint, direction: Direction, sign: str) -> LogConnection:
    """Elementary transformation of sign '+' or '-' at ``point`` in the given direction.

    The exponents (a, b) at the point become (b, a - 1) for '+' and (b + 1, a) for '-'; the degree
    moves by +1 and -1 respectively and the bundle class by +[P] and -[P].

    Raises:
        PreconditionError: For an unknown sign or the point at infinity
    """
    if sign not in ("+", "-"):
        raise PreconditionError(f"Unknown elementary transformation sign {sign!r}")
    coefficient_field = conn.coefficient_field
    u = local_parameter(inst, point, coefficient_field)
    one = inst.element(1, 0, coefficient_field)
    zero = inst.element(0, 0, coefficient_field)

    if sign == "+":
        scaling = Mat2(u, zero, zero, one)
    else:
        scaling = Mat2(one, zero, zero, one / u)
    frame = _frame(direction)
    transformed = gauge(inst, conn, frame.inverse() * scaling * frame)

    ledger = elm_ledger(inst, conn.ledger, point, sign)
    logger.debug(f"elm{sign} at {point} along {direction}: {conn.ledger.at(point)} -> {ledger.at(point)}")
    return replace(transformed, ledger=ledger)


def elm_ledger(inst: CurveInstance, ledger: ExponentLedger, point: CurvePoint, sign: str) -> ExponentLedger:
    """Exponent, degree and class bookkeeping of an elementary transformation at ``point``."""
    plus, minus = ledger.at(point)
    if sign == "+":
        return replace(
            ledger.with_exponents(point, minus, plus - 1),
            degree=ledger.degree + 1,
            bundle_class=class_add(inst, ledger.bundle_class, point_class(point)),
        )
    if sign == "-":
        return replace(
            ledger.with_exponents(point, minus + 1, plus),
            degree=ledger.degree - 1,
            bundle_class=class_add(inst, ledger.bundle_class, class_neg(inst, point_class(point))),
        )
    raise PreconditionError(f"Unknown elementary transformation sign {sign!r}")


def twist_ledger(inst: CurveInstance, ledger: ExponentLedger, xi: RankOneConnection) -> ExponentLedger:
    """Ledger of E (x) L after tensoring with a rank-one connection: exponents shift by its residues."""
    mapping = ledger.as_mapping()
    for point, value in xi.residues:
        plus, minus = mapping.get(point, (Fraction(0), Fraction(0)))
        mapping[point] = (plus + value, minus + value)
    bundle_class = class_add(inst, class_add(inst, ledger.bundle_class, xi.cls), xi.cls)
    return ExponentLedger.of(mapping, ledger.degree + 2 * xi.cls.degree, bundle_class)


@singledispatch
def fuchs_check(value: Any) -> bool:
    """Fuchs relation: degree plus the sum of all exponents vanishes."""
    raise TypeError(f"No Fuchs relation for {type(value).__name__}")


@fuchs_check.register
def _(value: ExponentLedger) -> bool:
    return value.degree + value.exponent_sum() == 0


@fuchs_check.register
def _(value: RankOneConnection) -> bool:
    return value.cls.degree + sum((r for _, r in value.residues), Fraction(0)) == 0


@fuchs_check.register
def _(value: LogConnection) -> bool:
    return fuchs_check(value.ledger)


def trace_form(conn: LogConnection) -> CurveElement:
    """Trace of the connection matrix, the coefficient of the induced connection on det E."""
    return conn.matrix.trace()


def connection_to_record(conn: LogConnection) -> Dict[str, Any]:
    return {
        "matrix": [e.to_text() for e in conn.matrix.entries()],
        "polar": conn.polar.to_record(),
        "ledger": conn.ledger.to_record(),
        "d_weight": format_rational(conn.d_weight),
    }


def connection_from_record(inst: CurveInstance, record: Dict[str, Any]) -> LogConnection:
    entries = [CurveElement.from_text(inst, text) for text in record["matrix"]]
    polar = Divisor.of({CurvePoint.parse(item["point"]): item["multiplicity"] for item in record.get("polar", [])})
    ledger_record = record.get("ledger", {})
    class_record = ledger_record.get("class", {"degree": 0, "sum": "inf"})
    ledger = ExponentLedger(
        tuple(
            (CurvePoint.parse(item["point"]), parse_rational(item["plus"]), parse_rational(item["minus"]))
            for item in ledger_record.get("exponents", [])
        ),
        ledger_record.get("degree", 0),
        DivisorClass(class_record["degree"], CurvePoint.parse(class_record["sum"])),
    )
    return LogConnection(Mat2(*entries), polar, ledger, parse_rational(record.get("d_weight", "1")))


def residue_trace_sum(inst: CurveInstance, conn: LogConnection, points: Iterable[CurvePoint]) -> Fraction:
    """Sum of the residues of tr(A) dx/y over ``points``."""
    return sum((residue_data(inst, conn, p).residue.trace() for p in points), Fraction(0))
