"""Exact-rational oracle for the expansion's approximation guarantees.

Digits, remainders, and convergents are computed in Fraction arithmetic
so inequalities like the convergent error bound can be decided exactly.
The remainder after n digits is recovered through the Moebius identity

    z_n = (p_n - z q_n) / (z q_{n-1} - p_{n-1})

instead of by repeated inversion, which keeps numerator and denominator
sizes linear in n rather than exponential.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from hurwitzcf.core import GaussianInt


@dataclass(frozen=True)
class QI:
    """Gaussian rational with exact components."""

    re: Fraction
    im: Fraction

    def __add__(self, o: "QI") -> "QI":
        return QI(self.re + o.re, self.im + o.im)

    def __sub__(self, o: "QI") -> "QI":
        return QI(self.re - o.re, self.im - o.im)

    def __mul__(self, o: "QI") -> "QI":
        return QI(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    def __neg__(self) -> "QI":
        return QI(-self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def recip(self) -> "QI":
        n = self.norm2()
        return QI(self.re / n, -self.im / n)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0


def qi_from_gauss(a: GaussianInt) -> QI:
    return QI(Fraction(a.re), Fraction(a.im))


def nearest_exact(z: QI) -> GaussianInt:
    """floor(t + 1/2) on each axis, exactly (matches nearest_gaussian)."""
    half = Fraction(1, 2)
    return GaussianInt(int((z.re + half).__floor__()), int((z.im + half).__floor__()))


def in_domain_exact(z: QI) -> bool:
    half = Fraction(1, 2)
    return -half <= z.re < half and -half <= z.im < half


@dataclass(frozen=True)
class ExactStep:
    digit: GaussianInt
    p: GaussianInt
    q: GaussianInt
    remainder: QI  # z_n, exactly


def exact_expansion(z: QI, depth: int) -> list[ExactStep]:
    """Expansion of z to `depth` digits with exact remainders.

    Stops early if the expansion terminates (z_n == 0).  Raises if z is
    outside the fundamental domain.
    """
    if not in_domain_exact(z):
        raise ValueError(f"{z} outside the fundamental domain")
    out: list[ExactStep] = []
    p_prev, p_cur = GaussianInt(1, 0), GaussianInt(0, 0)
    q_prev, q_cur = GaussianInt(0, 0), GaussianInt(1, 0)
    z_n = z
    for _ in range(depth):
        if z_n.is_zero():
            break
        u = z_n.recip()
        a = nearest_exact(u)
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        # Moebius form keeps the fraction small; equals u - a
        num = qi_from_gauss(p_cur) - z * qi_from_gauss(q_cur)
        den = z * qi_from_gauss(q_prev) - qi_from_gauss(p_prev)
        z_n = num * den.recip()
        out.append(ExactStep(a, p_cur, q_cur, z_n))
    return out


def determinant_is_unit(steps: list[ExactStep]) -> bool:
    """|p_n q_{n-1} - p_{n-1} q_n| = 1 at every consecutive pair."""
    p_prev, q_prev = GaussianInt(0, 0), GaussianInt(1, 0)
    for s in steps:
        det = s.p * q_prev - p_prev * s.q
        if det.norm() != 1:
            return False
        p_prev, q_prev = s.p, s.q
    return True


def error_bound_holds(z: QI, steps: list[ExactStep]) -> bool:
    """|z - p_n/q_n| < 2*sqrt(2)*|z_n|/|q_n|^2 decided in exact arithmetic.

    Squared form: |z q_n - p_n|^2 * |q_n|^2 < 8 |z_n|^2.  Terminating
    steps (z_n = 0 and z = p_n/q_n exactly) satisfy the bound as 0 < 0
    fails, so equality-of-zero counts as holding.
    """
    for s in steps:
        lhs = (z * qi_from_gauss(s.q) - qi_from_gauss(s.p)).norm2() * Fraction(
            s.q.norm()
        )
        rhs = 8 * s.remainder.norm2()
        if lhs == 0 and rhs == 0:
            continue
        if not lhs < rhs:
            return False
    return True


def growth_holds(steps: list[ExactStep]) -> bool:
    """|q_{n+2}| / |q_n| >= 3/2, i.e. 4 |q_{n+2}|^2 >= 9 |q_n|^2."""
    qs = [s.q for s in steps]
    return all(4 * b.norm() >= 9 * a.norm() for a, b in zip(qs, qs[2:]))
