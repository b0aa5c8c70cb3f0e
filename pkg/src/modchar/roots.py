"""Exact arithmetic with roots of unity and small cyclotomic sums.

Character values are either 0 or e(a/m) = exp(2*pi*i*a/m) with a/m a reduced
fraction in [0, 1). Storing the angle instead of a complex float keeps
products, powers, and conjugates exact: multiplication is angle addition
mod 1, so no drift accumulates over long sieves. Conversion to complex
happens once, at the edge of the numeric code.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class UnitValue:
    """Zero or an exact root of unity.

    numerator/denominator encode the angle in turns; denominator 0 is the
    reserved encoding for the value 0 (which is not on the unit circle but
    occurs as a character value at non-coprime arguments).
    """

    numerator: int
    denominator: int

    @staticmethod
    def zero() -> "UnitValue":
        return UnitValue(0, 0)

    @staticmethod
    def one() -> "UnitValue":
        return UnitValue(0, 1)

    @staticmethod
    def minus_one() -> "UnitValue":
        return UnitValue(1, 2)

    @staticmethod
    def root(a: int, m: int) -> "UnitValue":
        """e(a/m), reduced to canonical form with angle in [0, 1)."""
        if m <= 0:
            raise ValueError("root order must be positive")
        fr = Fraction(a % m, m)
        return UnitValue(fr.numerator, fr.denominator)

    @staticmethod
    def from_fraction(angle: Fraction) -> "UnitValue":
        fr = angle - math.floor(angle)
        return UnitValue(fr.numerator, fr.denominator)

    @property
    def is_zero(self) -> bool:
        return self.denominator == 0

    @property
    def is_one(self) -> bool:
        return self.denominator == 1

    @property
    def is_real(self) -> bool:
        return self.denominator in (0, 1, 2)

    @property
    def angle(self) -> Fraction | None:
        """Angle in turns, None for the zero value."""
        if self.is_zero:
            return None
        return Fraction(self.numerator, self.denominator)

    @property
    def order(self) -> int:
        """Multiplicative order; 0 denotes the zero value (no order)."""
        return self.denominator

    def __mul__(self, other: "UnitValue") -> "UnitValue":
        if self.is_zero or other.is_zero:
            return UnitValue.zero()
        return UnitValue.from_fraction(self.angle + other.angle)

    def __pow__(self, e: int) -> "UnitValue":
        if self.is_zero:
            if e <= 0:
                raise ZeroDivisionError("0 cannot be raised to a nonpositive power")
            return UnitValue.zero()
        return UnitValue.from_fraction(self.angle * e)

    def conjugate(self) -> "UnitValue":
        if self.is_zero:
            return self
        return UnitValue.from_fraction(-self.angle)

    def to_complex(self) -> complex:
        if self.is_zero:
            return 0j
        if self.denominator == 1:
            return 1 + 0j
        if self.denominator == 2:
            return -1 + 0j
        if self.denominator == 4:
            return 1j if self.numerator == 1 else -1j
        return cmath.exp(2j * math.pi * self.numerator / self.denominator)

    def __complex__(self) -> complex:
        return self.to_complex()

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        if self.is_one:
            return "1"
        if self.denominator == 2:
            return "-1"
        return f"e({self.numerator}/{self.denominator})"


@dataclass(frozen=True)
class CyclotomicSum:
    """Finite sum of rational multiples of roots of unity, kept exact.

    Terms are (angle, coefficient) pairs with distinct angles in [0, 1).
    Angles 0 and 1/2 are folded into the rational part at construction, so a
    sum whose value is rational (every real character case) reports it
    exactly via `rational`.
    """

    terms: tuple[tuple[Fraction, Fraction], ...]

    @staticmethod
    def from_pairs(pairs) -> "CyclotomicSum":
        acc: dict[Fraction, Fraction] = {}
        for angle, coeff in pairs:
            if coeff == 0:
                continue
            a = angle - math.floor(angle)
            if a == Fraction(1, 2):
                a, coeff = Fraction(0), -coeff
            acc[a] = acc.get(a, Fraction(0)) + coeff
        terms = tuple(sorted((a, c) for a, c in acc.items() if c != 0))
        return CyclotomicSum(terms)

    def scale(self, factor: Fraction) -> "CyclotomicSum":
        return CyclotomicSum.from_pairs((a, c * factor) for a, c in self.terms)

    @property
    def is_rational(self) -> bool:
        return all(a == 0 for a, _ in self.terms)

    @property
    def rational(self) -> Fraction:
        """Exact rational value; raises if irrational terms remain."""
        if not self.is_rational:
            raise ValueError("sum has non-real root-of-unity terms")
        return sum((c for _, c in self.terms), Fraction(0))

    def to_complex(self) -> complex:
        return sum((cmath.exp(2j * math.pi * float(a)) * float(c)
                    for a, c in self.terms), 0j)

    def __complex__(self) -> complex:
        return self.to_complex()
