"""Exact arithmetic in the Gaussian rationals and the finite Novikov ring.

The base field is Q(i). The finite Novikov ring is the semigroup algebra
k[Q>=0], whose elements are finite sums of monomials c * T^a.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

Rational = Union[int, Fraction]


def as_fraction(x: Rational | str) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


@dataclass(frozen=True, slots=True)
class FieldScalar:
    """A Gaussian rational re + im*i."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", as_fraction(self.re))
        object.__setattr__(self, "im", as_fraction(self.im))

    @staticmethod
    def coerce(x: "FieldScalar | Rational") -> "FieldScalar":
        if isinstance(x, FieldScalar):
            return x
        return FieldScalar(as_fraction(x), Fraction(0))

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __add__(self, other: "FieldScalar | Rational") -> "FieldScalar":
        o = other if type(other) is FieldScalar else FieldScalar.coerce(other)
        return _make(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "FieldScalar":
        return FieldScalar(-self.re, -self.im)

    def __sub__(self, other: "FieldScalar | Rational") -> "FieldScalar":
        o = other if type(other) is FieldScalar else FieldScalar.coerce(other)
        return _make(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: "FieldScalar | Rational") -> "FieldScalar":
        return FieldScalar.coerce(other) - self

    def __mul__(self, other: "FieldScalar | Rational") -> "FieldScalar":
        o = other if type(other) is FieldScalar else FieldScalar.coerce(other)
        if not self.im and not o.im:
            return _make(self.re * o.re, _FZERO)
        return _make(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conjugate(self) -> "FieldScalar":
        return FieldScalar(self.re, -self.im)

    def norm(self) -> Fraction:
        """Squared modulus |z|^2, which is exact."""
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "FieldScalar":
        if not self.im:
            if not self.re:
                raise ZeroDivisionError("inverse of zero in Q(i)")
            return _make(1 / self.re, _FZERO)
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(i)")
        return FieldScalar(self.re / n, -self.im / n)

    def __truediv__(self, other: "FieldScalar | Rational") -> "FieldScalar":
        return self * FieldScalar.coerce(other).inverse()

    def __rtruediv__(self, other: "FieldScalar | Rational") -> "FieldScalar":
        return FieldScalar.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "FieldScalar":
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FieldScalar):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __repr__(self) -> str:
        return f"FieldScalar({self})"

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


_FZERO = Fraction(0)


def _make(re: Fraction, im: Fraction) -> FieldScalar:
    """Unchecked constructor for results of Fraction arithmetic."""
    out = object.__new__(FieldScalar)
    object.__setattr__(out, "re", re)
    object.__setattr__(out, "im", im)
    return out


ZERO = FieldScalar(Fraction(0), Fraction(0))
ONE = FieldScalar(Fraction(1), Fraction(0))
I = FieldScalar(Fraction(0), Fraction(1))


@dataclass(frozen=True, slots=True)
class NovikovScalar:
    """Finite sum of c_a T^a with exponents a >= 0.

    ``terms`` holds (exponent, coefficient) pairs with strictly increasing
    exponents and nonzero coefficients; the zero element has no terms.
    """

    terms: tuple[tuple[Fraction, FieldScalar], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", _normalize(self.terms))

    @staticmethod
    def monomial(exponent: Rational, coefficient: FieldScalar | Rational = 1) -> "NovikovScalar":
        return NovikovScalar(((as_fraction(exponent), FieldScalar.coerce(coefficient)),))

    @staticmethod
    def constant(c: FieldScalar | Rational) -> "NovikovScalar":
        return NovikovScalar.monomial(0, c)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "NovikovScalar") -> "NovikovScalar":
        return add(self, other)

    def __neg__(self) -> "NovikovScalar":
        return NovikovScalar(tuple((a, -c) for a, c in self.terms))

    def __sub__(self, other: "NovikovScalar") -> "NovikovScalar":
        return add(self, -other)

    def __mul__(self, other: "NovikovScalar") -> "NovikovScalar":
        return mul(self, other)

    def __repr__(self) -> str:
        if not self.terms:
            return "NovikovScalar(0)"
        body = " + ".join(f"({c})T^{a}" for a, c in self.terms)
        return f"NovikovScalar({body})"


def _normalize(terms: Iterable[tuple[Rational, FieldScalar | Rational]]) -> tuple[tuple[Fraction, FieldScalar], ...]:
    acc: dict[Fraction, FieldScalar] = {}
    for a, c in terms:
        a = as_fraction(a)
        if a < 0:
            raise ValueError(f"Novikov exponents must be >= 0, got {a}")
        acc[a] = acc.get(a, ZERO) + FieldScalar.coerce(c)
    return tuple((a, acc[a]) for a in sorted(acc) if not acc[a].is_zero())


def add(a: NovikovScalar, b: NovikovScalar) -> NovikovScalar:
    return NovikovScalar(a.terms + b.terms)


def mul(a: NovikovScalar, b: NovikovScalar) -> NovikovScalar:
    return NovikovScalar(tuple((x + y, c * d) for x, c in a.terms for y, d in b.terms))


def valuation(a: NovikovScalar) -> Fraction | float:
    """Smallest exponent with nonzero coefficient, ``math.inf`` for zero."""
    if not a.terms:
        return float("inf")
    return a.terms[0][0]


def reduce_at_T_equals_1(a: NovikovScalar) -> FieldScalar:
    total = ZERO
    for _, c in a.terms:
        total = total + c
    return total
