"""Exact numbers of the form ``sign * sqrt(p/q)``.

Clebsch-Gordan coefficients are square roots of rationals, so they are kept in
this form; products of coefficients that happen to be rational can be turned
back into :class:`fractions.Fraction` with :meth:`SqrtRational.to_fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt, sqrt

__all__ = ["SqrtRational", "half_twice", "fraction_str", "exact_sqrt"]


def exact_sqrt(q: Fraction) -> Fraction | None:
    """Return the rational square root of ``q`` or ``None`` if it is irrational."""
    q = Fraction(q)
    if q < 0:
        return None
    p, d = q.numerator, q.denominator
    rp, rd = isqrt(p), isqrt(d)
    if rp * rp == p and rd * rd == d:
        return Fraction(rp, rd)
    return None


@dataclass(frozen=True)
class SqrtRational:
    """The real number ``sign * sqrt(square)`` with ``square`` a non-negative rational."""

    sign: int
    square: Fraction

    def __post_init__(self):
        sq = Fraction(self.square)
        if sq < 0:
            raise ValueError("square must be non-negative")
        sign = 0 if sq == 0 else (1 if self.sign > 0 else -1)
        if self.sign == 0 and sq != 0:
            raise ValueError("zero sign with non-zero square")
        object.__setattr__(self, "square", sq)
        object.__setattr__(self, "sign", sign)

    @classmethod
    def from_fraction(cls, x) -> "SqrtRational":
        x = Fraction(x)
        return cls((x > 0) - (x < 0), x * x)

    @classmethod
    def zero(cls) -> "SqrtRational":
        return cls(0, Fraction(0))

    def __float__(self) -> float:
        # sqrt of numerator and denominator separately keeps huge values finite
        if self.sign == 0:
            return 0.0
        p, q = self.square.numerator, self.square.denominator
        try:
            return self.sign * sqrt(p / q)
        except OverflowError:
            shift = max(p.bit_length(), q.bit_length()) - 1000
            shift -= shift % 2
            return self.sign * sqrt((p >> shift) / (q >> shift))

    def __neg__(self) -> "SqrtRational":
        return SqrtRational(-self.sign, self.square)

    def __mul__(self, other) -> "SqrtRational":
        if not isinstance(other, SqrtRational):
            other = SqrtRational.from_fraction(other)
        return SqrtRational(self.sign * other.sign, self.square * other.square)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "SqrtRational":
        if not isinstance(other, SqrtRational):
            other = SqrtRational.from_fraction(other)
        if other.sign == 0:
            raise ZeroDivisionError("division by zero")
        return SqrtRational(self.sign * other.sign, self.square / other.square)

    def inverse(self) -> "SqrtRational":
        return SqrtRational(1, Fraction(1)) / self

    def squared(self) -> Fraction:
        return self.square

    def is_rational(self) -> bool:
        return exact_sqrt(self.square) is not None

    def to_fraction(self) -> Fraction:
        root = exact_sqrt(self.square)
        if root is None:
            raise ValueError(f"{self} is irrational")
        return self.sign * root

    def __str__(self) -> str:
        if self.sign == 0:
            return "0"
        s = "" if self.sign > 0 else "-"
        root = exact_sqrt(self.square)
        if root is not None:
            return f"{s}{fraction_str(root)}"
        return f"{s}sqrt({fraction_str(self.square)})"


def fraction_str(x: Fraction) -> str:
    """Serialize a rational as ``"p/q"`` (or ``"p"`` for integers)."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def half_twice(x) -> int:
    """Return ``2*x`` as an int, requiring ``x`` to be an integer or half-integer."""
    t = Fraction(x) * 2
    if t.denominator != 1:
        raise ValueError(f"{x!r} is not a half-integer")
    return int(t)
