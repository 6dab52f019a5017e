"""Second-order jets for exact directional derivatives of rational expressions."""

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Sequence, Tuple

from .errors import DomainError


@dataclass(frozen=True)
class Jet2:
    """Value and partial derivatives up to order two along two directions u and v."""

    v: Any
    d1: Any = Fraction(0)
    d2: Any = Fraction(0)
    d11: Any = Fraction(0)
    d12: Any = Fraction(0)
    d22: Any = Fraction(0)

    @classmethod
    def constant(cls, value: Any) -> "Jet2":
        return cls(value)

    @staticmethod
    def lift(other: Any) -> "Jet2":
        return other if isinstance(other, Jet2) else Jet2.constant(other)

    def __add__(self, other: Any) -> "Jet2":
        other = self.lift(other)
        return Jet2(
            self.v + other.v,
            self.d1 + other.d1,
            self.d2 + other.d2,
            self.d11 + other.d11,
            self.d12 + other.d12,
            self.d22 + other.d22,
        )

    __radd__ = __add__

    def __neg__(self) -> "Jet2":
        return Jet2(-self.v, -self.d1, -self.d2, -self.d11, -self.d12, -self.d22)

    def __sub__(self, other: Any) -> "Jet2":
        return self + (-self.lift(other))

    def __rsub__(self, other: Any) -> "Jet2":
        return self.lift(other) + (-self)

    def __mul__(self, other: Any) -> "Jet2":
        g = self.lift(other)
        return Jet2(
            self.v * g.v,
            self.d1 * g.v + self.v * g.d1,
            self.d2 * g.v + self.v * g.d2,
            self.d11 * g.v + 2 * self.d1 * g.d1 + self.v * g.d11,
            self.d12 * g.v + self.d1 * g.d2 + self.d2 * g.d1 + self.v * g.d12,
            self.d22 * g.v + 2 * self.d2 * g.d2 + self.v * g.d22,
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        """1/self by the chain rule for t -> 1/t.

        Raises:
            DomainError: If the value vanishes
        """
        if not self.v:
            raise DomainError("Jet reciprocal at a zero value")
        first = -1 / (self.v * self.v)
        second = 2 / (self.v * self.v * self.v)
        return Jet2(
            1 / self.v,
            first * self.d1,
            first * self.d2,
            second * self.d1 * self.d1 + first * self.d11,
            second * self.d1 * self.d2 + first * self.d12,
            second * self.d2 * self.d2 + first * self.d22,
        )

    def __truediv__(self, other: Any) -> "Jet2":
        return self * self.lift(other).reciprocal()

    def __rtruediv__(self, other: Any) -> "Jet2":
        return self.lift(other) * self.reciprocal()

    def __pow__(self, exponent: int) -> "Jet2":
        if exponent < 0:
            return (self**-exponent).reciprocal()
        result = Jet2.constant(Fraction(1))
        for _ in range(exponent):
            result = result * self
        return result


def jet2_seed(point: Sequence[Any], dirs: Tuple[int, int]) -> Tuple[Jet2, ...]:
    """Variables of ``point`` lifted to jets that differentiate along coordinates ``dirs``."""
    first, second = dirs
    for index in dirs:
        if not 0 <= index < len(point):
            raise DomainError(f"Direction {index} is outside a {len(point)}-dimensional point")
    return tuple(
        Jet2(
            Fraction(value),
            Fraction(1 if i == first else 0),
            Fraction(1 if i == second else 0),
        )
        for i, value in enumerate(point)
    )


def jet2_eval(expr: Callable[..., Any], point: Sequence[Any], dirs: Tuple[int, int]) -> Jet2:
    """Evaluate an arithmetic expression with its first and mixed second derivatives.

    Args:
        expr: Rational expression built from +, -, *, / and integer powers
        point: Exact coordinates of the evaluation point
        dirs: Coordinate indices (j, k); d1 is the j-th partial and d12 the (j, k) mixed partial

    Returns:
        The jet of ``expr`` at ``point``

    Raises:
        DomainError: If the expression has a pole at ``point``
    """
    result = expr(*jet2_seed(point, dirs))
    return result if isinstance(result, Jet2) else Jet2.constant(result)
