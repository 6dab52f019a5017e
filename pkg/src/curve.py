"""The elliptic curve y^2 = x(x-1)(x-lambda) and its function field.

Points, the chord-tangent group law, function-field elements a(x) + b(x)*y, local Laurent
expansions, valuations, residues and divisors with their classes all live here.
"""

import functools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import sympy

from .errors import DomainError, InvalidInstanceError, UnsupportedLocusError
from .exact import QQ, Field, Poly, RatFunc, format_rational, parse_rational, rational_sqrt

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CurvePoint:
    """Rational point of the curve; ``x is None`` marks the point at infinity."""

    x: Optional[Fraction] = None
    y: Optional[Fraction] = None

    def __post_init__(self):
        if (self.x is None) != (self.y is None):
            raise DomainError("A curve point needs both coordinates or neither")
        if self.x is not None:
            object.__setattr__(self, "x", parse_rational(self.x))
            object.__setattr__(self, "y", parse_rational(self.y))

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    @property
    def is_two_torsion(self) -> bool:
        return self.is_infinity or self.y == 0

    def sort_key(self) -> Tuple:
        if self.is_infinity:
            return (0, Fraction(0), Fraction(0))
        return (1, self.x, self.y)

    @classmethod
    def parse(cls, text: str) -> "CurvePoint":
        """Parse ``"inf"`` or ``"(x,y)"``."""
        literal = text.strip()
        if literal == "inf":
            return cls()
        if not (literal.startswith("(") and literal.endswith(")")) or literal.count(",") != 1:
            raise DomainError(f"Not a curve point: {text!r}")
        x_text, y_text = literal[1:-1].split(",")
        return cls(parse_rational(x_text), parse_rational(y_text))

    def __str__(self) -> str:
        if self.is_infinity:
            return "inf"
        return f"({format_rational(self.x)},{format_rational(self.y)})"


W_INF = CurvePoint()


@functools.lru_cache(maxsize=None)
def _cubic(lam: Fraction, coefficient_field: Field) -> Poly:
    return Poly(coefficient_field, (0, lam, -(1 + lam), 1))


@dataclass(frozen=True)
class CurveInstance:
    """Concrete curve with the two marked points t1 = (t, r) and t2 = (t, -r) and exponents nu."""

    lam: Fraction
    t: Fraction
    r: Fraction
    nu1: Fraction = Fraction(0)
    nu2: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("lam", "t", "r", "nu1", "nu2"):
            try:
                object.__setattr__(self, name, parse_rational(getattr(self, name)))
            except DomainError as e:
                raise InvalidInstanceError(f"Invalid {name}: {e}") from e

        if self.lam in (0, 1):
            raise InvalidInstanceError(f"lambda must differ from 0 and 1, got {self.lam}")
        if self.t in (0, 1, self.lam):
            raise InvalidInstanceError(f"t must differ from 0, 1 and lambda, got {self.t}")
        if self.r == 0:
            raise InvalidInstanceError("r must be nonzero")
        if self.r * self.r != self.f(self.t):
            raise InvalidInstanceError(
                f"r^2 = {format_rational(self.r * self.r)} differs from "
                f"t(t-1)(t-lambda) = {format_rational(self.f(self.t))}"
            )

    @classmethod
    def from_parameters(cls, lam: Any, t: Any, nu1: Any = 0, nu2: Any = 0, r: Any = None) -> "CurveInstance":
        """Build an instance, taking r as the positive square root of f(t) when it is not given."""
        if r is None:
            lam_value, t_value = parse_rational(lam), parse_rational(t)
            r = rational_sqrt(t_value * (t_value - 1) * (t_value - lam_value))
            if r is None:
                raise InvalidInstanceError(f"t(t-1)(t-lambda) is not a rational square for t = {t_value}")
        return cls(lam, t, r, nu1, nu2)

    @property
    def a2(self) -> Fraction:
        return -(1 + self.lam)

    @property
    def a4(self) -> Fraction:
        return self.lam

    def f(self, x0: Any) -> Any:
        return x0 * (x0 - 1) * (x0 - self.lam)

    def f_prime(self, x0: Any) -> Any:
        return 3 * x0 * x0 + 2 * self.a2 * x0 + self.a4

    def cubic(self, coefficient_field: Field = QQ) -> Poly:
        return _cubic(self.lam, coefficient_field)

    @property
    def w_inf(self) -> CurvePoint:
        return W_INF

    @property
    def w0(self) -> CurvePoint:
        return CurvePoint(0, 0)

    @property
    def w1(self) -> CurvePoint:
        return CurvePoint(1, 0)

    @property
    def w_lam(self) -> CurvePoint:
        return CurvePoint(self.lam, 0)

    @property
    def t1(self) -> CurvePoint:
        return CurvePoint(self.t, self.r)

    @property
    def t2(self) -> CurvePoint:
        return CurvePoint(self.t, -self.r)

    @property
    def finite_two_torsion(self) -> Tuple[CurvePoint, CurvePoint, CurvePoint]:
        return (self.w0, self.w1, self.w_lam)

    @property
    def poles(self) -> Tuple[CurvePoint, CurvePoint]:
        return (self.t1, self.t2)

    def named_point(self, name: str) -> CurvePoint:
        """Resolve one of w_inf, w0, w1, w_lam, t1, t2 or a literal ``(x,y)``/``inf`` point."""
        names = {"w_inf": self.w_inf, "w0": self.w0, "w1": self.w1, "w_lam": self.w_lam, "t1": self.t1, "t2": self.t2}
        if name in names:
            return names[name]
        point = CurvePoint.parse(name)
        if not on_curve(self, point):
            raise DomainError(f"{point} is not on the curve")
        return point

    def divisor_d(self) -> "Divisor":
        """D = t1 + t2."""
        return Divisor.of({self.t1: 1, self.t2: 1})

    def divisor_d_prime(self) -> "Divisor":
        """D' = w0 + w1 + w_lam + t1 + t2."""
        return Divisor.of({self.w0: 1, self.w1: 1, self.w_lam: 1, self.t1: 1, self.t2: 1})

    def x_element(self, coefficient_field: Field = QQ) -> "CurveElement":
        return self.element(RatFunc.x(coefficient_field), 0, coefficient_field)

    def y_element(self, coefficient_field: Field = QQ) -> "CurveElement":
        return self.element(0, 1, coefficient_field)

    def element(self, a: Any = 0, b: Any = 0, coefficient_field: Field = QQ) -> "CurveElement":
        return CurveElement(
            _as_ratfunc(a, coefficient_field), _as_ratfunc(b, coefficient_field), self.cubic(coefficient_field)
        )

    def to_record(self) -> Dict[str, str]:
        return {
            "lambda": format_rational(self.lam),
            "t": format_rational(self.t),
            "r": format_rational(self.r),
            "nu1": format_rational(self.nu1),
            "nu2": format_rational(self.nu2),
        }


INSTANCES: Dict[str, CurveInstance] = {
    "A": CurveInstance(-3, 3, 6, Fraction(1, 3), Fraction(1, 5)),
    "B": CurveInstance(-3, 3, 6, Fraction(1, 3), Fraction(-4, 3)),
    "C": CurveInstance(-3, 3, 6, Fraction(2, 3), Fraction(1, 3)),
}


def on_curve(inst: CurveInstance, point: CurvePoint) -> bool:
    return point.is_infinity or point.y * point.y == inst.f(point.x)


def _require_on_curve(inst: CurveInstance, point: CurvePoint) -> None:
    if not on_curve(inst, point):
        raise DomainError(f"{point} is not on the curve")


def group_neg(inst: CurveInstance, point: CurvePoint) -> CurvePoint:
    _require_on_curve(inst, point)
    if point.is_infinity:
        return point
    return CurvePoint(point.x, -point.y)


def group_add(inst: CurveInstance, first: CurvePoint, second: CurvePoint) -> CurvePoint:
    """Chord-tangent sum with w_inf as the identity."""
    _require_on_curve(inst, first)
    _require_on_curve(inst, second)
    if first.is_infinity:
        return second
    if second.is_infinity:
        return first

    if first.x == second.x:
        if first.y == -second.y:
            return W_INF
        slope = inst.f_prime(first.x) / (2 * first.y)
    else:
        slope = (second.y - first.y) / (second.x - first.x)

    x3 = slope * slope - inst.a2 - first.x - second.x
    y3 = -(first.y + slope * (x3 - first.x))
    return CurvePoint(x3, y3)


def group_mul(inst: CurveInstance, n: int, point: CurvePoint) -> CurvePoint:
    if n < 0:
        return group_mul(inst, -n, group_neg(inst, point))
    result = W_INF
    addend = point
    while n:
        if n & 1:
            result = group_add(inst, result, addend)
        addend = group_add(inst, addend, addend)
        n >>= 1
    return result


def group_sum(inst: CurveInstance, points: Iterable[CurvePoint]) -> CurvePoint:
    return functools.reduce(lambda acc, p: group_add(inst, acc, p), points, W_INF)


def _as_ratfunc(value: Any, coefficient_field: Field) -> RatFunc:
    if isinstance(value, RatFunc) and value.field is coefficient_field:
        return value
    if isinstance(value, Poly) and value.field is coefficient_field:
        return RatFunc(value)
    return RatFunc.constant(coefficient_field, value)


class CurveElement:
    """Function-field element a(x) + b(x)*y subject to y^2 = f(x)."""

    __slots__ = ("a", "b", "f")

    def __init__(self, a: RatFunc, b: RatFunc, f: Poly):
        self.a = a
        self.b = b
        self.f = f

    @property
    def field(self) -> Field:
        return self.f.field

    def _coerce(self, other: Any) -> Optional["CurveElement"]:
        if isinstance(other, CurveElement):
            if other.f != self.f:
                raise DomainError("Cannot mix elements of different function fields")
            return other
        try:
            return CurveElement(_as_ratfunc(other, self.field), RatFunc(Poly.zero(self.field)), self.f)
        except DomainError:
            return None

    def _make(self, a: RatFunc, b: RatFunc) -> "CurveElement":
        return CurveElement(a, b, self.f)

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    def __eq__(self, other: Any) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self) -> int:
        return hash((self.a, self.b))

    def __neg__(self) -> "CurveElement":
        return self._make(-self.a, -self.b)

    def __add__(self, other: Any) -> "CurveElement":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._make(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "CurveElement":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._make(self.a - other.a, self.b - other.b)

    def __rsub__(self, other: Any) -> "CurveElement":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other: Any) -> "CurveElement":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not other.b:
            return self._make(self.a * other.a, self.b * other.a)
        if not self.b:
            return self._make(self.a * other.a, self.a * other.b)
        return self._make(
            self.a * other.a + self.b * other.b * self.f,
            self.a * other.b + self.b * other.a,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "CurveElement":
        return self._make(self.a, -self.b)

    def norm(self) -> RatFunc:
        """a^2 - b^2 f."""
        return self.a * self.a - self.b * self.b * self.f

    def inverse(self) -> "CurveElement":
        norm = self.norm()
        if not norm:
            raise DomainError("Division by the zero function")
        return self._make(self.a / norm, -self.b / norm)

    def __truediv__(self, other: Any) -> "CurveElement":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not other.b:
            if not other.a:
                raise DomainError("Division by the zero function")
            return self._make(self.a / other.a, self.b / other.a)
        return self * other.inverse()

    def __rtruediv__(self, other: Any) -> "CurveElement":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, exponent: int) -> "CurveElement":
        base = self if exponent >= 0 else self.inverse()
        result = self._make(RatFunc.constant(self.field, 1), RatFunc(Poly.zero(self.field)))
        for _ in range(abs(exponent)):
            result = result * base
        return result

    def derivative(self) -> "CurveElement":
        """d/dx, using dy/dx = f'/(2y) = f' y / (2 f)."""
        f_prime = RatFunc(self.f.derivative())
        return self._make(self.a.derivative(), self.b.derivative() + self.b * f_prime / (2 * RatFunc(self.f)))

    def to_text(self) -> str:
        return f"{self.a.to_text()}|{self.b.to_text()}"

    @classmethod
    def from_text(cls, inst: CurveInstance, text: str, coefficient_field: Field = QQ) -> "CurveElement":
        a_text, separator, b_text = text.partition("|")
        if not separator:
            raise DomainError(f"Not a curve element: {text!r}")
        a = RatFunc.from_text(coefficient_field, a_text)
        return inst.element(a, RatFunc.from_text(coefficient_field, b_text), coefficient_field)

    def __repr__(self) -> str:
        return f"CurveElement({self.to_text()})"

    __str__ = to_text


class LaurentSeries:
    """Truncated Laurent series sum c_k u^k for start <= k < precision.

    Leading zero coefficients are stripped, so a series with coefficients has valuation ``start``.
    A series without coefficients is only known to vanish below ``precision``.
    """

    __slots__ = ("start", "coeffs", "precision", "field")

    def __init__(self, start: int, coeffs: Sequence[Any], precision: int, coefficient_field: Field = QQ):
        values = list(coeffs[: max(precision - start, 0)])
        values += [coefficient_field.zero] * (precision - start - len(values))
        while values and not values[0]:
            values.pop(0)
            start += 1
        if not values:
            start = precision
        self.start = start
        self.coeffs = tuple(values)
        self.precision = precision
        self.field = coefficient_field

    @classmethod
    def exact(cls, start: int, coeffs: Sequence[Any], precision: int, coefficient_field: Field = QQ) -> "LaurentSeries":
        return cls(start, coeffs, precision, coefficient_field)

    @property
    def valuation(self) -> Optional[int]:
        return self.start if self.coeffs else None

    def coefficient(self, power: int) -> Any:
        if power >= self.precision:
            raise DomainError(f"Coefficient of u^{power} is beyond the series precision {self.precision}")
        if power < self.start:
            return self.field.zero
        return self.coeffs[power - self.start]

    def _lift(self, other: Any) -> "LaurentSeries":
        if isinstance(other, LaurentSeries):
            return other
        return LaurentSeries(0, (self.field.coerce(other),), max(self.precision, 1), self.field)

    def __add__(self, other: Any) -> "LaurentSeries":
        other = self._lift(other)
        start = min(self.start, other.start)
        precision = min(self.precision, other.precision)
        return LaurentSeries(
            start,
            [self._safe(k) + other._safe(k) for k in range(start, precision)],
            precision,
            self.field,
        )

    __radd__ = __add__

    def _safe(self, power: int) -> Any:
        if power < self.start or power - self.start >= len(self.coeffs):
            return self.field.zero
        return self.coeffs[power - self.start]

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries(self.start, [-c for c in self.coeffs], self.precision, self.field)

    def __sub__(self, other: Any) -> "LaurentSeries":
        return self + (-self._lift(other))

    def __rsub__(self, other: Any) -> "LaurentSeries":
        return self._lift(other) + (-self)

    def __mul__(self, other: Any) -> "LaurentSeries":
        if not isinstance(other, LaurentSeries):
            value = self.field.coerce(other)
            return LaurentSeries(self.start, [c * value for c in self.coeffs], self.precision, self.field)
        start = self.start + other.start
        precision = min(self.precision + other.start, other.precision + self.start)
        terms = [self.field.zero] * max(precision - start, 0)
        for i, left in enumerate(self.coeffs):
            if not left:
                continue
            for j, right in enumerate(other.coeffs):
                if i + j >= len(terms):
                    break
                terms[i + j] = terms[i + j] + left * right
        return LaurentSeries(start, terms, precision, self.field)

    __rmul__ = __mul__

    def inverse(self) -> "LaurentSeries":
        if not self.coeffs:
            raise DomainError("Cannot invert a series with no known nonzero coefficient")
        relative = self.precision - self.start
        lead_inverse = self.field.inverse(self.coeffs[0])
        result = [lead_inverse]
        for n in range(1, relative):
            total = self.field.zero
            for i in range(1, min(n, len(self.coeffs) - 1) + 1):
                total = total + self.coeffs[i] * result[n - i]
            result.append(-total * lead_inverse)
        return LaurentSeries(-self.start, result, relative - self.start, self.field)

    def __truediv__(self, other: Any) -> "LaurentSeries":
        if isinstance(other, LaurentSeries):
            return self * other.inverse()
        return self * self.field.inverse(self.field.coerce(other))

    def __rtruediv__(self, other: Any) -> "LaurentSeries":
        return self._lift(other) * self.inverse()

    def derivative(self) -> "LaurentSeries":
        return LaurentSeries(
            self.start - 1,
            [c * (self.start + k) for k, c in enumerate(self.coeffs)],
            self.precision - 1,
            self.field,
        )

    def shifted(self, power: int) -> "LaurentSeries":
        """Multiply by u**power."""
        return LaurentSeries(self.start + power, self.coeffs, self.precision + power, self.field)

    def __repr__(self) -> str:
        return f"LaurentSeries(start={self.start}, coeffs={self.coeffs}, precision={self.precision})"


@dataclass(frozen=True)
class LocalChart:
    """Expansions of x, y and dx/y (as a multiple of du) in a local parameter u at a point."""

    x: LaurentSeries
    y: LaurentSeries
    dx_over_y: LaurentSeries


def _iterate_fixed_point(step, seed: LaurentSeries, rounds: int) -> LaurentSeries:
    value = seed
    for _ in range(rounds):
        value = step(value)
    return value


def local_chart(inst: CurveInstance, point: CurvePoint, terms: int, coefficient_field: Field = QQ) -> LocalChart:
    """Expand the coordinate functions at ``point`` to roughly ``terms`` coefficients.

    The local parameter is x - x0 at affine points with y0 != 0, y at the finite 2-torsion
    points and x/y at infinity.
    """
    _require_on_curve(inst, point)
    one = coefficient_field.one
    zero = coefficient_field.zero
    lam = coefficient_field.coerce(inst.lam)
    f = inst.cubic(coefficient_field)

    if point.is_infinity:
        # w = 1/x solves w = u^2 (1 + a2 w + a4 w^2)
        u_squared = LaurentSeries(2, (one,), terms + 2, coefficient_field)
        a2 = coefficient_field.coerce(inst.a2)

        def step(w: LaurentSeries) -> LaurentSeries:
            return u_squared * (1 + a2 * w + lam * w * w)

        w = _iterate_fixed_point(step, u_squared, terms // 2 + 2)
        x = w.inverse()
        y = x.shifted(-1)
        dx_over_y = -(w.derivative().shifted(1)) / w
        return LocalChart(x, y, dx_over_y)

    x0 = coefficient_field.coerce(point.x)
    y0 = coefficient_field.coerce(point.y)

    if point.y == 0:
        # u = y and x = x0 + s with c1 s + c2 s^2 + s^3 = u^2
        c1 = coefficient_field.coerce(inst.f_prime(point.x))
        c2 = coefficient_field.coerce(3 * point.x + inst.a2)
        u_squared = LaurentSeries(2, (one,), terms, coefficient_field)
        c1_inverse = coefficient_field.inverse(c1)

        def step(s: LaurentSeries) -> LaurentSeries:
            return (u_squared - c2 * s * s - s * s * s) * c1_inverse

        s = _iterate_fixed_point(step, u_squared * c1_inverse, terms // 2 + 2)
        x = s + x0
        y = LaurentSeries(1, (one,), terms, coefficient_field)
        f_prime = f.derivative()
        dx_over_y = 2 * f_prime(x).inverse()
        return LocalChart(x, y, dx_over_y)

    # u = x - x0 and y = y0 * sqrt(1 + h(u)) with h(u) = (f(x0 + u) - y0^2) / y0^2
    x = LaurentSeries(0, (x0, one), terms, coefficient_field)
    shifted = f.shift(x0)
    scale = coefficient_field.inverse(y0 * y0)
    h = [c * scale for c in shifted.coeffs]
    h[0] = zero
    roots = [one]
    half = coefficient_field.coerce(Fraction(1, 2))
    for n in range(1, terms):
        h_n = h[n] if n < len(h) else zero
        cross = zero
        for i in range(1, n):
            cross = cross + roots[i] * roots[n - i]
        roots.append((h_n - cross) * half)
    y = LaurentSeries(0, [c * y0 for c in roots], terms, coefficient_field)
    return LocalChart(x, y, y.inverse())


def _evaluate(function: RatFunc, x: LaurentSeries) -> LaurentSeries:
    numerator = x._lift(function.num(x))
    denominator = x._lift(function.den(x))
    return numerator * denominator.inverse()


def _expand(g: CurveElement, chart: LocalChart) -> LaurentSeries:
    series = _evaluate(g.a, chart.x)
    if g.b:
        series = series + _evaluate(g.b, chart.x) * chart.y
    return series


MAX_EXPANSION_ROUNDS = 8


def local_series(
    inst: CurveInstance, g: CurveElement, point: CurvePoint, order: int, form: bool = False
) -> LaurentSeries:
    """Laurent expansion of g (or of the form g dx/y when ``form``) known at least through u^order.

    Raises:
        DomainError: If the requested precision cannot be reached
    """
    terms = max(order, 0) + 8
    for _ in range(MAX_EXPANSION_ROUNDS):
        chart = local_chart(inst, point, terms, g.field)
        series = _expand(g, chart)
        if form:
            series = series * chart.dx_over_y
        if series.precision > order:
            return series
        terms *= 2
    raise DomainError(f"Could not expand {g} at {point} through u^{order}")


def valuation(inst: CurveInstance, g: CurveElement, point: CurvePoint) -> int:
    """Order of g at ``point`` in the local parameter there.

    Raises:
        DomainError: For the zero function or a point off the curve
    """
    _require_on_curve(inst, point)
    if not g:
        raise DomainError("The zero function has no valuation")

    if point.is_infinity:
        orders = []
        if g.a:
            orders.append(-2 * g.a.degree)
        if g.b:
            orders.append(-2 * g.b.degree - 3)
        return min(orders)

    if point.y == 0:
        orders = []
        if g.a:
            orders.append(2 * g.a.order_at(point.x))
        if g.b:
            orders.append(2 * g.b.order_at(point.x) + 1)
        return min(orders)

    if not g.b:
        return g.a.order_at(point.x)
    if not g.a:
        return g.b.order_at(point.x)
    a_order, b_order = g.a.order_at(point.x), g.b.order_at(point.x)
    if a_order != b_order:
        return min(a_order, b_order)

    order = a_order
    while True:
        series = local_series(inst, g, point, order + 4)
        if series.valuation is not None:
            return series.valuation
        order += 8


def residue(inst: CurveInstance, g: CurveElement, point: CurvePoint) -> Any:
    """Residue of the form g dx/y at ``point``."""
    if not g:
        return g.field.zero
    return local_series(inst, g, point, -1, form=True).coefficient(-1)


@dataclass(frozen=True)
class Divisor:
    """Finite formal sum of rational points.

    ``blocks`` holds conjugate clusters of non-rational points as (factor, multiplicity, degree),
    where ``degree`` counts the geometric points lying over the irreducible factor of x.
    """

    terms: Tuple[Tuple[CurvePoint, int], ...] = ()
    blocks: Tuple[Tuple[str, int, int], ...] = ()

    def __post_init__(self):
        merged: Dict[CurvePoint, int] = {}
        for point, multiplicity in self.terms:
            merged[point] = merged.get(point, 0) + multiplicity
        ordered = tuple(sorted(((p, m) for p, m in merged.items() if m), key=lambda item: item[0].sort_key()))
        object.__setattr__(self, "terms", ordered)
        object.__setattr__(self, "blocks", tuple(sorted(b for b in self.blocks if b[1])))

    @classmethod
    def of(cls, mapping: Mapping[CurvePoint, int]) -> "Divisor":
        return cls(tuple(mapping.items()))

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.terms) + sum(m * d for _, m, d in self.blocks)

    def multiplicity(self, point: CurvePoint) -> int:
        return dict(self.terms).get(point, 0)

    def support(self) -> Tuple[CurvePoint, ...]:
        return tuple(p for p, _ in self.terms)

    def is_effective(self) -> bool:
        return all(m > 0 for _, m in self.terms) and all(m > 0 for _, m, _ in self.blocks)

    def __add__(self, other: "Divisor") -> "Divisor":
        return Divisor(self.terms + other.terms, self.blocks + other.blocks)

    def __neg__(self) -> "Divisor":
        return Divisor(tuple((p, -m) for p, m in self.terms), tuple((q, -m, d) for q, m, d in self.blocks))

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __rmul__(self, n: int) -> "Divisor":
        return Divisor(tuple((p, n * m) for p, m in self.terms), tuple((q, n * m, d) for q, m, d in self.blocks))

    def union(self, other: "Divisor") -> "Divisor":
        """Pointwise maximum of multiplicities."""
        points = set(self.support()) | set(other.support())
        return Divisor.of({p: max(self.multiplicity(p), other.multiplicity(p)) for p in points})

    def to_record(self) -> List[Dict[str, Any]]:
        record: List[Dict[str, Any]] = [{"point": str(p), "multiplicity": m} for p, m in self.terms]
        record.extend({"factor": q, "multiplicity": m, "degree": d} for q, m, d in self.blocks)
        return record

    def __str__(self) -> str:
        parts = [f"{m}*{p}" for p, m in self.terms] + [f"{m}*[{q}]" for q, m, _ in self.blocks]
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class DivisorClass:
    """Linear-equivalence class of a divisor: its degree and its sum in the group law."""

    degree: int
    sum: CurvePoint = W_INF

    def __str__(self) -> str:
        return f"[deg {self.degree}, sum {self.sum}]"


TRIVIAL_CLASS = DivisorClass(0, W_INF)


def point_class(point: CurvePoint) -> DivisorClass:
    """Class of the degree-one divisor [point]."""
    return DivisorClass(1, point)


def class_of(inst: CurveInstance, divisor: Divisor) -> DivisorClass:
    """Class of a divisor; conjugate blocks add degree only since their points sum to w_inf."""
    total = group_sum(inst, (group_mul(inst, m, p) for p, m in divisor.terms))
    return DivisorClass(divisor.degree, total)


def class_add(inst: CurveInstance, first: DivisorClass, second: DivisorClass) -> DivisorClass:
    return DivisorClass(first.degree + second.degree, group_add(inst, first.sum, second.sum))


def class_neg(inst: CurveInstance, value: DivisorClass) -> DivisorClass:
    return DivisorClass(-value.degree, group_neg(inst, value.sum))


def class_mul(inst: CurveInstance, n: int, value: DivisorClass) -> DivisorClass:
    return DivisorClass(n * value.degree, group_mul(inst, n, value.sum))


def linear_equiv(inst: CurveInstance, first: Divisor, second: Divisor) -> bool:
    return class_of(inst, first) == class_of(inst, second)


def h0(inst: CurveInstance, value: DivisorClass) -> int:
    """Dimension of global sections of the line bundle of a class (Riemann-Roch in genus one)."""
    if value.degree > 0:
        return value.degree
    if value.degree == 0:
        return 1 if value.sum.is_infinity else 0
    return 0


@functools.lru_cache(maxsize=1024)
def _factor_rational(poly_coeffs: Tuple[Fraction, ...]) -> Tuple[Tuple[Tuple[Fraction, ...], int], ...]:
    symbol = sympy.Symbol("x")
    expression = sum(sympy.Rational(c.numerator, c.denominator) * symbol**i for i, c in enumerate(poly_coeffs))
    _, factors = sympy.factor_list(expression, symbol)
    result = []
    for factor, multiplicity in factors:
        coefficients = sympy.Poly(factor, symbol).all_coeffs()
        result.append(
            (tuple(Fraction(int(sympy.numer(c)), int(sympy.denom(c))) for c in reversed(coefficients)), multiplicity)
        )
    return tuple(result)


def factor_over_rationals(poly: Poly) -> List[Tuple[Poly, int]]:
    """Monic irreducible factors over QQ with multiplicities.

    Raises:
        DomainError: For polynomials over QQ(eps)
    """
    if poly.field is not QQ:
        raise DomainError(f"Factorization needs coefficients in QQ, not {poly.field}")
    if poly.degree <= 0:
        return []
    return [(Poly(QQ, coeffs).monic(), m) for coeffs, m in _factor_rational(poly.coeffs)]


def _points_over(inst: CurveInstance, x0: Fraction) -> Optional[Tuple[CurvePoint, ...]]:
    value = inst.f(x0)
    if value == 0:
        return (CurvePoint(x0, 0),)
    root = rational_sqrt(value)
    if root is None:
        return None
    return (CurvePoint(x0, root), CurvePoint(x0, -root))


def _linear_root(factor: Poly) -> Fraction:
    return -factor.coeffs[0] / factor.coeffs[1]


def divisor_of(inst: CurveInstance, g: CurveElement) -> Divisor:
    """Divisor of zeros minus poles of a nonzero function over QQ.

    Raises:
        DomainError: For the zero function
        UnsupportedLocusError: If a zero or pole of a function with y-part lies over a non-rational point
    """
    if not g:
        raise DomainError("The zero function has no divisor")
    if g.field is not QQ:
        raise DomainError("Divisors are only computed over QQ")

    norm = g.norm()
    candidates: Dict[Fraction, None] = {p.x: None for p in inst.finite_two_torsion}
    blocks: List[Tuple[str, int, int]] = []
    nonlinear: Dict[Tuple, Poly] = {}

    for poly in (norm.num, norm.den, g.a.den, g.b.den):
        for factor, _ in factor_over_rationals(poly):
            if factor.degree == 1:
                candidates.setdefault(_linear_root(factor), None)
            else:
                nonlinear[factor.coeffs] = factor

    for factor in nonlinear.values():
        if g.b:
            raise UnsupportedLocusError(f"Zeros or poles over the irreducible factor {factor.to_text()}")
        multiplicity = _factor_multiplicity(g.a.num, factor) - _factor_multiplicity(g.a.den, factor)
        blocks.append((factor.to_text(), multiplicity, 2 * factor.degree))

    terms: Dict[CurvePoint, int] = {}
    for x0 in candidates:
        points = _points_over(inst, x0)
        if points is None:
            if not g.b:
                blocks.append((Poly(QQ, (-x0, 1)).to_text(), g.a.order_at(x0), 2))
                continue
            if norm.order_at(x0) == 0 and g.a.order_at(x0) >= 0 and g.b.order_at(x0) >= 0:
                continue
            raise UnsupportedLocusError(f"Zeros or poles over x = {format_rational(x0)} are not rational")
        for point in points:
            terms[point] = valuation(inst, g, point)
    terms[W_INF] = valuation(inst, g, W_INF)

    divisor = Divisor(tuple(terms.items()), tuple(blocks))
    if divisor.degree != 0:
        raise DomainError(f"Divisor of {g} has degree {divisor.degree}")
    logger.debug(f"div({g}) = {divisor}")
    return divisor


def _factor_multiplicity(poly: Poly, factor: Poly) -> int:
    count = 0
    while True:
        quotient, remainder = poly.divmod(factor)
        if remainder:
            return count
        poly = quotient
        count += 1


def poles_of(inst: CurveInstance, g: CurveElement) -> Divisor:
    """Polar divisor of a nonzero function (rational poles only).

    Raises:
        UnsupportedLocusError: If a pole lies over a non-rational point
    """
    if not g:
        raise DomainError("The zero function has no polar divisor")
    candidates: Dict[Any, None] = {}
    for denominator in (g.a.den, g.b.den):
        if g.field is QQ:
            for factor, _ in factor_over_rationals(denominator):
                if factor.degree > 1:
                    raise UnsupportedLocusError(f"Poles over the irreducible factor {factor.to_text()}")
                candidates.setdefault(_linear_root(factor), None)
        elif denominator.degree > 0:
            raise DomainError("Polar divisors are only computed over QQ")

    poles: Dict[CurvePoint, int] = {}
    for x0 in candidates:
        points = _points_over(inst, x0)
        if points is None:
            raise UnsupportedLocusError(f"Poles over x = {format_rational(x0)} are not rational")
        for point in points:
            order = valuation(inst, g, point)
            if order < 0:
                poles[point] = -order
    order = valuation(inst, g, W_INF)
    if order < 0:
        poles[W_INF] = -order
    return Divisor.of(poles)


def in_linear_system(inst: CurveInstance, g: CurveElement, divisor: Divisor) -> bool:
    """Whether div(g) + D >= 0, i.e. g lies in H^0(O(D))."""
    if not g:
        raise DomainError("Membership is only decided for nonzero functions")
    for point, order in poles_of(inst, g).terms:
        if divisor.multiplicity(point) < order:
            return False
    for point, multiplicity in divisor.terms:
        if multiplicity < 0 and valuation(inst, g, point) < -multiplicity:
            return False
    return True


def residue_sum(inst: CurveInstance, g: CurveElement) -> Any:
    """Sum of the residues of g dx/y over its poles."""
    total = g.field.zero
    for point in poles_of(inst, g).support():
        total = total + residue(inst, g, point)
    return total
