"""Exact arithmetic substrate: prime-field residues, rational helpers and
circle (torus) geometry.

Every probability produced by the analyzer is a ``fractions.Fraction``.
Floats never enter the exact path; they only appear in sampler exports and
in the variance lab.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import floor

__all__ = [
    "Rational",
    "is_prime",
    "Residue",
    "mod_inverse",
    "parse_rational",
    "format_rational",
    "torus_dist",
    "CircularInterval",
    "circular_overlap",
]

# Exact probabilities are plain stdlib fractions (arbitrary precision,
# normalized with positive denominator, which is exactly the contract).
Rational = Fraction


def is_prime(n: int) -> bool:
    """Trial-division primality test; moduli here stay small (a few hundred)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Residue:
    """Element of the prime field Z/NZ, stored as the integer in [0, N).

    The field carries the integer ("field-scaled") form; division by N to
    land on the unit interval happens only when points are materialized.
    """

    value: int
    modulus: int

    def __post_init__(self):
        if not is_prime(self.modulus):
            raise ValueError(f"modulus {self.modulus} is not prime")
        if not 0 <= self.value < self.modulus:
            raise ValueError(f"value {self.value} outside [0, {self.modulus})")

    def _check(self, other: "Residue") -> None:
        if self.modulus != other.modulus:
            raise ValueError("residues from different fields")

    def __add__(self, other: "Residue") -> "Residue":
        self._check(other)
        return Residue((self.value + other.value) % self.modulus, self.modulus)

    def __sub__(self, other: "Residue") -> "Residue":
        self._check(other)
        return Residue((self.value - other.value) % self.modulus, self.modulus)

    def __mul__(self, other: "Residue") -> "Residue":
        self._check(other)
        return Residue((self.value * other.value) % self.modulus, self.modulus)

    def __neg__(self) -> "Residue":
        return Residue((-self.value) % self.modulus, self.modulus)

    def inverse(self) -> "Residue":
        return mod_inverse(self)

    def as_fraction(self) -> Fraction:
        """The unit-interval form value/N."""
        return Fraction(self.value, self.modulus)


def mod_inverse(a: Residue) -> Residue:
    """Multiplicative inverse in the prime field; rejects zero."""
    if a.value == 0:
        raise ZeroDivisionError(f"no inverse for 0 mod {a.modulus}")
    return Residue(pow(a.value, -1, a.modulus), a.modulus)


def parse_rational(text: str) -> Fraction:
    """Parse "num/den", integer, or decimal strings into an exact rational.

    Decimal strings are read exactly ("0.6" -> 3/5); binary floats are
    rejected so they can never leak into the exact path.
    """
    if isinstance(text, float):
        raise TypeError("refusing to parse a binary float into the exact path")
    if isinstance(text, (Fraction, int)):
        return Fraction(text)
    return Fraction(text.strip())


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def torus_dist(x, y) -> Fraction:
    """Distance on the circle T^1: min of the two arc lengths between x, y."""
    x, y = Fraction(x), Fraction(y)
    if not (0 <= x < 1 and 0 <= y < 1):
        raise ValueError("torus coordinates must lie in [0, 1)")
    hi, lo = (x, y) if x >= y else (y, x)
    return min(hi - lo, 1 - hi + lo)


@dataclass(frozen=True)
class CircularInterval:
    """Half-open arc [start, start+length) on the unit circle.

    start lies in [0,1); length in [0,1]. start+length > 1 wraps past 1.
    """

    start: Fraction
    length: Fraction

    def __post_init__(self):
        object.__setattr__(self, "start", Fraction(self.start))
        object.__setattr__(self, "length", Fraction(self.length))
        if not 0 <= self.start < 1:
            raise ValueError("start must lie in [0, 1)")
        if not 0 <= self.length <= 1:
            raise ValueError("length must lie in [0, 1]")

    def segments(self) -> list:
        """The arc as one or two linear half-open pieces inside [0, 1)."""
        end = self.start + self.length
        if end <= 1:
            return [(self.start, end)]
        return [(self.start, Fraction(1)), (Fraction(0), end - 1)]


def circular_overlap(a: CircularInterval, b: CircularInterval) -> Fraction:
    """Lebesgue measure of the intersection of two arcs on the circle."""
    total = Fraction(0)
    for lo1, hi1 in a.segments():
        for lo2, hi2 in b.segments():
            lo, hi = max(lo1, lo2), min(hi1, hi2)
            if hi > lo:
                total += hi - lo
    return total


def stratum_index(x, n: int) -> int:
    """1-based index eta of the stratum [(eta-1)/n, eta/n) containing x."""
    x = Fraction(x)
    if not 0 <= x < 1:
        raise ValueError("x must lie in [0, 1)")
    return floor(n * x) + 1
