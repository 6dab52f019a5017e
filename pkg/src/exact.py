"""Exact arithmetic: rational scalars, coefficient fields, polynomials and rational functions.

Two coefficient fields are provided. ``QQ`` holds plain :class:`fractions.Fraction` values.
``QQ_EPS`` is the rational function field in a formal parameter eps; its elements are
:class:`RatFunc` instances over ``QQ``. Polynomials and rational functions in the curve
coordinate x are generic over either field.

Every value is kept in canonical form so that structural equality is mathematical equality.
"""

import logging
import math
import re
from fractions import Fraction
from typing import Any, Iterable, Optional, Sequence, Tuple, Union

from .errors import DomainError

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]

_RATIONAL_PATTERN = re.compile(r"(-?\d+)(?:/(\d+))?")
_LIST_PATTERN = re.compile(r"\[(.*)\]")


def parse_rational(value: Any) -> Fraction:
    """Parse a rational literal.

    Args:
        value: ``"p/q"`` or ``"p"`` text with an optional leading minus, an int or a Fraction

    Returns:
        The value as a Fraction

    Raises:
        DomainError: If the value is not an exact rational literal
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError(f"Not a rational literal: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise DomainError(f"Not a rational literal: {value!r}")

    match = _RATIONAL_PATTERN.fullmatch(value.strip())
    if not match:
        raise DomainError(f"Not a rational literal: {value!r}")
    denominator = int(match.group(2)) if match.group(2) else 1
    if denominator == 0:
        raise DomainError(f"Zero denominator in rational literal: {value!r}")
    return Fraction(int(match.group(1)), denominator)


def format_rational(value: Number) -> str:
    return str(Fraction(value))


def rational_sqrt(value: Number) -> Optional[Fraction]:
    """Exact square root of a rational, or None when it is not a square in QQ."""
    value = Fraction(value)
    if value < 0:
        return None
    num_root = math.isqrt(value.numerator)
    den_root = math.isqrt(value.denominator)
    if num_root * num_root != value.numerator or den_root * den_root != value.denominator:
        return None
    return Fraction(num_root, den_root)


def normalize_projective(values: Sequence[Number]) -> Tuple[int, ...]:
    """Canonical integer representative of a projective point.

    Denominators are cleared, the content is divided out and the first nonzero entry is made positive.

    Raises:
        DomainError: If every entry is zero
    """
    fractions = [Fraction(v) for v in values]
    if not any(fractions):
        raise DomainError("The zero vector is not a projective point")

    common = 1
    for value in fractions:
        common = common * value.denominator // math.gcd(common, value.denominator)
    integers = [int(value * common) for value in fractions]

    content = 0
    for value in integers:
        content = math.gcd(content, value)
    integers = [value // content for value in integers]

    leading = next(value for value in integers if value)
    if leading < 0:
        integers = [-value for value in integers]
    return tuple(integers)


def projectively_equal(first: Sequence[Number], second: Sequence[Number]) -> bool:
    if len(first) != len(second) or not any(first) or not any(second):
        return False
    return all(
        first[i] * second[j] == first[j] * second[i] for i in range(len(first)) for j in range(i + 1, len(first))
    )


def format_projective(values: Sequence[Number]) -> str:
    return "(" + ":".join(format_rational(v) for v in values) + ")"


class RationalField:
    """The field QQ of rational numbers."""

    name = "QQ"
    zero = Fraction(0)
    one = Fraction(1)

    def coerce(self, value: Any) -> Fraction:
        try:
            return parse_rational(value)
        except DomainError:
            raise DomainError(f"Cannot coerce {value!r} into {self.name}") from None

    def inverse(self, value: Fraction) -> Fraction:
        if value == 0:
            raise DomainError("Division by zero")
        return 1 / value

    def sqrt(self, value: Fraction) -> Optional[Fraction]:
        return rational_sqrt(value)

    def format(self, value: Fraction) -> str:
        return format_rational(value)

    def parse(self, text: str) -> Fraction:
        return parse_rational(text)

    def __repr__(self) -> str:
        return self.name


class EpsilonField:
    """The field QQ(eps) of rational functions in a formal parameter eps.

    Only scalars and rational functions over QQ are accepted as elements. A rational function over
    QQ(eps) itself is a function of x, never a scalar of this field.
    """

    name = "QQ(eps)"

    @property
    def zero(self) -> "RatFunc":
        return RatFunc.constant(QQ, 0)

    @property
    def one(self) -> "RatFunc":
        return RatFunc.constant(QQ, 1)

    @property
    def eps(self) -> "RatFunc":
        return RatFunc.x(QQ)

    def coerce(self, value: Any) -> "RatFunc":
        if isinstance(value, RatFunc):
            if value.field is QQ:
                return value
            raise DomainError(f"Cannot coerce a function over {value.field} into {self.name}")
        if isinstance(value, Poly):
            if value.field is QQ:
                return RatFunc(value)
            raise DomainError(f"Cannot coerce a polynomial over {value.field} into {self.name}")
        return RatFunc.constant(QQ, QQ.coerce(value))

    def inverse(self, value: "RatFunc") -> "RatFunc":
        if not value:
            raise DomainError("Division by zero")
        return self.one / value

    def sqrt(self, value: "RatFunc") -> Optional["RatFunc"]:
        if not value.is_constant():
            return None
        root = rational_sqrt(value.constant_value())
        return None if root is None else self.coerce(root)

    def valuation(self, value: "RatFunc") -> Optional[int]:
        """Order of vanishing at eps = 0, or None for the zero element."""
        if not value:
            return None
        return value.num.order_at(0) - value.den.order_at(0)

    def has_pole_at_zero(self, value: "RatFunc") -> bool:
        return value.den.coeffs[0] == 0

    def evaluate_at_zero(self, value: "RatFunc") -> Fraction:
        if self.has_pole_at_zero(value):
            raise DomainError(f"{value} has a pole at eps = 0")
        return value(Fraction(0))

    def format(self, value: "RatFunc") -> str:
        return value.to_text()

    def parse(self, text: str) -> "RatFunc":
        return RatFunc.from_text(QQ, text)

    def __repr__(self) -> str:
        return self.name


Field = Union[RationalField, EpsilonField]

QQ = RationalField()
QQ_EPS = EpsilonField()


def _parse_coefficients(field: Field, text: str) -> Tuple[Any, ...]:
    match = _LIST_PATTERN.fullmatch(text.strip())
    if not match:
        raise DomainError(f"Not a coefficient list: {text!r}")
    body = match.group(1).strip()
    if not body:
        return ()
    return tuple(field.parse(item) for item in body.split(","))


class Poly:
    """Dense univariate polynomial over a coefficient field, lowest degree first.

    Trailing zero coefficients are stripped, so the zero polynomial has no coefficients
    and degree ``ZERO_DEGREE``.
    """

    ZERO_DEGREE = -1

    __slots__ = ("field", "coeffs")

    def __init__(self, field: Field, coeffs: Iterable[Any] = ()):
        values = [field.coerce(c) for c in coeffs]
        while values and not values[-1]:
            values.pop()
        self.field = field
        self.coeffs = tuple(values)

    @classmethod
    def zero(cls, field: Field) -> "Poly":
        return cls(field)

    @classmethod
    def one(cls, field: Field) -> "Poly":
        return cls(field, (field.one,))

    @classmethod
    def constant(cls, field: Field, value: Any) -> "Poly":
        return cls(field, (value,))

    @classmethod
    def x(cls, field: Field) -> "Poly":
        return cls(field, (field.zero, field.one))

    @classmethod
    def monomial(cls, field: Field, power: int, value: Any = 1) -> "Poly":
        return cls(field, [field.zero] * power + [field.coerce(value)])

    @classmethod
    def from_text(cls, field: Field, text: str) -> "Poly":
        return cls(field, _parse_coefficients(field, text))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Any:
        return self.coeffs[-1] if self.coeffs else self.field.zero

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return self.degree <= 0

    def coefficient(self, power: int) -> Any:
        if 0 <= power < len(self.coeffs):
            return self.coeffs[power]
        return self.field.zero

    def _coerce(self, other: Any) -> Optional["Poly"]:
        if isinstance(other, Poly):
            if other.field is self.field:
                return other
            if self.field is QQ_EPS and other.field is QQ:
                # A polynomial over QQ is an eps-scalar here
                return Poly.constant(QQ_EPS, other)
            raise DomainError(f"Cannot mix polynomials over {self.field} and {other.field}")
        try:
            return Poly.constant(self.field, other)
        except DomainError:
            return None

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, Poly):
            return self.field is other.field and self.coeffs == other.coeffs
        if isinstance(other, RatFunc):
            return NotImplemented
        coerced = self._coerce(other)
        return coerced is not None and self.coeffs == coerced.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __neg__(self) -> "Poly":
        return Poly(self.field, [-c for c in self.coeffs])

    def __add__(self, other: Any) -> "Poly":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        size = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.field, [self.coefficient(i) + other.coefficient(i) for i in range(size)])

    __radd__ = __add__

    def __sub__(self, other: Any) -> "Poly":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Any) -> "Poly":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other: Any) -> "Poly":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return Poly.zero(self.field)
        if len(other.coeffs) == 1:
            return self.scale(other.coeffs[0])
        if len(self.coeffs) == 1:
            return other.scale(self.coeffs[0])
        product = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, left in enumerate(self.coeffs):
            if not left:
                continue
            for j, right in enumerate(other.coeffs):
                product[i + j] = product[i + j] + left * right
        return Poly(self.field, product)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Poly":
        if exponent < 0:
            raise DomainError("Negative powers of a polynomial are not polynomials")
        result = Poly.one(self.field)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def scale(self, value: Any) -> "Poly":
        value = self.field.coerce(value)
        return Poly(self.field, [c * value for c in self.coeffs])

    def divmod(self, divisor: "Poly") -> Tuple["Poly", "Poly"]:
        """Euclidean division.

        Raises:
            DomainError: If the divisor is zero
        """
        if divisor.is_zero():
            raise DomainError("Polynomial division by zero")
        remainder = list(self.coeffs)
        quotient = [self.field.zero] * max(len(remainder) - len(divisor.coeffs) + 1, 0)
        lead_inverse = self.field.inverse(divisor.leading)
        shift = len(remainder) - len(divisor.coeffs)
        while shift >= 0:
            factor = remainder[shift + len(divisor.coeffs) - 1] * lead_inverse
            quotient[shift] = factor
            if factor:
                for i, c in enumerate(divisor.coeffs):
                    remainder[shift + i] = remainder[shift + i] - factor * c
            shift -= 1
        return Poly(self.field, quotient), Poly(self.field, remainder[: len(divisor.coeffs) - 1])

    def __floordiv__(self, divisor: "Poly") -> "Poly":
        return self.divmod(divisor)[0]

    def __mod__(self, divisor: "Poly") -> "Poly":
        return self.divmod(divisor)[1]

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self.scale(self.field.inverse(self.leading))

    def derivative(self) -> "Poly":
        return Poly(self.field, [c * power for power, c in enumerate(self.coeffs)][1:])

    def __call__(self, value: Any) -> Any:
        """Evaluate by Horner's rule; ``value`` may be a scalar, a polynomial or a series."""
        if not self.coeffs:
            return self.field.zero
        result = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            result = result * value + c
        return result

    def compose(self, inner: "Poly") -> "Poly":
        result = self(inner)
        return result if isinstance(result, Poly) else Poly.constant(self.field, result)

    def shift(self, origin: Any) -> "Poly":
        """Coefficients of p(x + origin)."""
        return self.compose(Poly.x(self.field) + origin)

    def order_at(self, point: Any) -> int:
        """Multiplicity of ``point`` as a root.

        Raises:
            DomainError: For the zero polynomial
        """
        if self.is_zero():
            raise DomainError("The zero polynomial has no order")
        coeffs = self.shift(point).coeffs if point else self.coeffs
        order = 0
        while not coeffs[order]:
            order += 1
        return order

    def reversed(self, degree: int) -> "Poly":
        """x**degree * p(1/x) for a degree not below the polynomial's own degree."""
        if degree < self.degree:
            raise DomainError(f"Cannot reverse a degree {self.degree} polynomial at degree {degree}")
        padded = list(self.coeffs) + [self.field.zero] * (degree + 1 - len(self.coeffs))
        return Poly(self.field, reversed(padded))

    def to_text(self) -> str:
        return "[" + ",".join(self.field.format(c) for c in self.coeffs) + "]"

    def __repr__(self) -> str:
        return f"Poly({self.field}, {self.to_text()})"


def poly_gcd(first: Poly, second: Poly) -> Poly:
    """Monic greatest common divisor by the Euclidean algorithm."""
    while not second.is_zero():
        first, second = second, first % second
    return first.monic()


def poly_derivative(poly: Poly) -> Poly:
    return poly.derivative()


class RatFunc:
    """Rational function num/den in x, kept with gcd(num, den) = 1 and a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Optional[Poly] = None):
        field = num.field
        if den is None:
            den = Poly.one(field)
        if den.field is not field:
            raise DomainError(f"Numerator over {field} and denominator over {den.field}")
        if den.is_zero():
            raise DomainError("Rational function with zero denominator")

        if num.is_zero():
            num, den = Poly.zero(field), Poly.one(field)
        else:
            if den.degree > 0:
                common = poly_gcd(num, den)
                if common.degree > 0:
                    num, den = num // common, den // common
            if den.leading != field.one:
                inverse = field.inverse(den.leading)
                num, den = num.scale(inverse), den.scale(inverse)
        self.num = num
        self.den = den

    @classmethod
    def _canonical(cls, num: Poly, den: Poly) -> "RatFunc":
        value = cls.__new__(cls)
        value.num = num
        value.den = den
        return value

    @classmethod
    def constant(cls, field: Field, value: Any) -> "RatFunc":
        return cls(Poly.constant(field, value))

    @classmethod
    def x(cls, field: Field) -> "RatFunc":
        return cls(Poly.x(field))

    @classmethod
    def from_text(cls, field: Field, text: str) -> "RatFunc":
        """Parse ``"[n0,n1,...]/[d0,d1,...]"`` or a bare numerator list."""
        head, slash, tail = text.strip().partition("]/")
        if slash:
            return cls(Poly.from_text(field, head + "]"), Poly.from_text(field, tail))
        return cls(Poly.from_text(field, text))

    @property
    def field(self) -> Field:
        return self.num.field

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def is_constant(self) -> bool:
        return self.den.degree == 0 and self.num.degree <= 0

    def constant_value(self) -> Any:
        if not self.is_constant():
            raise DomainError(f"{self} is not constant")
        return self.num.coefficient(0)

    @property
    def degree(self) -> int:
        """deg num - deg den."""
        if self.num.is_zero():
            raise DomainError("The zero function has no degree")
        return self.num.degree - self.den.degree

    def _coerce(self, other: Any) -> Optional["RatFunc"]:
        if isinstance(other, RatFunc) and other.field is self.field:
            return other
        if isinstance(other, Poly) and other.field is self.field:
            return RatFunc(other)
        if self.field is QQ_EPS and isinstance(other, (RatFunc, Poly)) and other.field is QQ:
            return RatFunc.constant(QQ_EPS, other)
        try:
            return RatFunc.constant(self.field, other)
        except DomainError:
            return None

    def _promoted(self, other: Any) -> Optional["RatFunc"]:
        """This eps-scalar as a constant function over QQ(eps) when ``other`` is one, else None."""
        if self.field is QQ and isinstance(other, RatFunc) and other.field is QQ_EPS:
            return RatFunc.constant(QQ_EPS, self)
        return None

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def __eq__(self, other: Any) -> bool:
        promoted = self._promoted(other)
        if promoted is not None:
            return promoted == other
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num.coeffs, self.den.coeffs))

    def __neg__(self) -> "RatFunc":
        return RatFunc._canonical(-self.num, self.den)

    def __add__(self, other: Any) -> "RatFunc":
        promoted = self._promoted(other)
        if promoted is not None:
            return promoted + other
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not other:
            return self
        if not self:
            return other
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "RatFunc":
        promoted = self._promoted(other)
        if promoted is not None:
            return promoted - other
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Any) -> "RatFunc":
        promoted = self._promoted(other)
        if promoted is not None:
            return other - promoted
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other: Any) -> "RatFunc":
        promoted = self._promoted(other)
        if promoted is not None:
            return promoted * other
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not self or not other:
            return RatFunc(Poly.zero(self.field))
        if other.is_constant():
            return RatFunc._canonical(self.num.scale(other.constant_value()), self.den)
        if self.is_constant():
            return RatFunc._canonical(other.num.scale(self.constant_value()), other.den)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "RatFunc":
        promoted = self._promoted(other)
        if promoted is not None:
            return promoted / other
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not other:
            raise DomainError("Division by the zero function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other: Any) -> "RatFunc":
        promoted = self._promoted(other)
        if promoted is not None:
            return other / promoted
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, exponent: int) -> "RatFunc":
        if exponent < 0:
            if not self:
                raise DomainError("Division by the zero function")
            return RatFunc(self.den ** (-exponent), self.num ** (-exponent))
        return RatFunc(self.num**exponent, self.den**exponent)

    def derivative(self) -> "RatFunc":
        return RatFunc(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def __call__(self, value: Any) -> Any:
        """Evaluate at a field element.

        Raises:
            DomainError: If the denominator vanishes there
        """
        denominator = self.den(value)
        if not denominator:
            raise DomainError(f"{self} has a pole at {value}")
        return self.num(value) / denominator

    def order_at(self, point: Any) -> int:
        """Order of zero (positive) or pole (negative) at x = point."""
        if not self:
            raise DomainError("The zero function has no order")
        return self.num.order_at(point) - self.den.order_at(point)

    def to_text(self) -> str:
        return f"{self.num.to_text()}/{self.den.to_text()}"

    def __repr__(self) -> str:
        return f"RatFunc({self.field}, {self.to_text()})"

    __str__ = to_text


def eps_valuation(value: Union[Poly, RatFunc]) -> Optional[int]:
    """Gauss valuation at eps = 0 of a polynomial or rational function in x over QQ(eps).

    Returns:
        The smallest eps-valuation of the coefficients (numerator minus denominator), or None for zero
    """
    if isinstance(value, RatFunc):
        if not value:
            return None
        return eps_valuation(value.num) - eps_valuation(value.den)
    orders = [QQ_EPS.valuation(c) for c in value.coeffs if c]
    return min(orders) if orders else None


def specialize_at_zero(value: RatFunc) -> RatFunc:
    """Set eps = 0 in a rational function in x over QQ(eps).

    Raises:
        DomainError: If the function is not regular at eps = 0
    """
    if value.field is not QQ_EPS:
        raise DomainError(f"Only functions over {QQ_EPS} can be specialized")
    if not value:
        return RatFunc(Poly.zero(QQ))
    order = eps_valuation(value)
    if order < 0:
        raise DomainError(f"{value} has a pole at eps = 0")

    shift = eps_valuation(value.den)
    scale = QQ_EPS.eps ** (-shift)

    def reduce(poly: Poly) -> Poly:
        return Poly(QQ, [QQ_EPS.evaluate_at_zero(c * scale) for c in poly.coeffs])

    return RatFunc(reduce(value.num), reduce(value.den))
