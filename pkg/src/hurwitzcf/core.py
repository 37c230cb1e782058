"""Gaussian integers and the fundamental domain of the Hurwitz expansion.

The fundamental domain K is the half-open unit square centered at the
origin, [-1/2, 1/2) x [-1/2, 1/2).  Rounding a complex number to the
nearest Gaussian integer is defined so that the remainder always lands
back in K: ties on either axis round up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class DomainError(ValueError):
    """Input lies outside the operation's domain."""


@dataclass(frozen=True, slots=True)
class GaussianInt:
    """Element of Z[i] with exact integer components."""

    re: int
    im: int

    def __add__(self, other: "GaussianInt") -> "GaussianInt":
        return GaussianInt(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianInt") -> "GaussianInt":
        return GaussianInt(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "GaussianInt") -> "GaussianInt":
        return GaussianInt(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __neg__(self) -> "GaussianInt":
        return GaussianInt(-self.re, -self.im)

    def conj(self) -> "GaussianInt":
        return GaussianInt(self.re, -self.im)

    def norm(self) -> int:
        """Field norm re^2 + im^2 (exact int)."""
        return self.re * self.re + self.im * self.im

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            body = {1: "i", -1: "-i"}.get(self.im)
            return body if body else f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        imag = "i" if mag == 1 else f"{mag}i"
        return f"{self.re}{sign}{imag}"


ZERO = GaussianInt(0, 0)
ONE = GaussianInt(1, 0)
I = GaussianInt(0, 1)

#: The four units of Z[i]; together with 0 they are excluded from the
#: digit alphabet because 1/z for z in K never rounds to them.
UNITS = (ONE, -ONE, I, -I)


def _round_half_up(t: float) -> int:
    m = math.floor(t + 0.5)
    # t + 0.5 can round up across an integer (e.g. t the double just
    # below 0.5), which would push the remainder t - m below -1/2; the
    # opposite direction cannot occur for an exactly representable t
    if t - m < -0.5:
        m -= 1
    return m


def nearest_gaussian(z: complex) -> GaussianInt:
    """Round z to the Gaussian integer [z] with z - [z] in K.

    Each axis uses floor(t + 1/2), so half-integers round towards
    +infinity: 0.5 -> 1 and -0.5 -> 0.
    """
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"cannot round non-finite value {z!r}")
    return GaussianInt(_round_half_up(z.real), _round_half_up(z.imag))


def in_fundamental_domain(z: complex) -> bool:
    """True iff z lies in K = [-1/2, 1/2) x [-1/2, 1/2)."""
    return -0.5 <= z.real < 0.5 and -0.5 <= z.imag < 0.5


def is_digit(a: GaussianInt) -> bool:
    """True iff a belongs to the digit alphabet G = Z[i] \\ {0, units}."""
    return a.norm() > 1
