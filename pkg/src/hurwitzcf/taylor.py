"""Truncated bivariate Taylor jets and the quadrature kernel.

The density integrand is 1/((ax - by + 1)^2 + (ay + bx)^2)^2 as a
function of the expansion point (x,y); its mixed partial derivatives at
a fixed base point are what the estimator integrates against pixel
positions (a,b).  Instead of differentiating symbolically we carry
truncated Taylor jets: coeff[m][n] holds (1/(m! n!)) d^{m+n}f/dx^m dy^n,
so every derivative up to degree L per variable falls out of one jet
evaluation.

Two routes compute the same thing: kernel_matrix composes generic jet
operations (readable, one pixel at a time), while kernel_weighted_sums
exploits the closed 13-term support of the squared denominator to run
the reciprocal recurrence vectorized across a whole batch of pixels.
The test suite holds the two routes against each other and against
high-precision central differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np


class SingularJet(ZeroDivisionError):
    """Reciprocal of a jet with zero constant term."""


class SingularKernel(ZeroDivisionError):
    """Kernel denominator vanishes at the base point."""


# Denominator constants below this are treated as an exact singularity.
_DENOM_FLOOR = 1e-300


@dataclass(frozen=True, slots=True)
class TaylorJet:
    """Bivariate Taylor polynomial truncated at degree L per variable."""

    L: int
    coeffs: np.ndarray  # (L+1, L+1), coeffs[m, n] on x^m y^n

    def __post_init__(self) -> None:
        want = (self.L + 1, self.L + 1)
        if self.coeffs.shape != want:
            raise ValueError(f"coefficient array must be {want}")

    @property
    def constant(self) -> float:
        return float(self.coeffs[0, 0])

    def derivative(self, m: int, n: int) -> float:
        """Raw mixed partial d^{m+n}/dx^m dy^n at the base point."""
        return float(self.coeffs[m, n]) * factorial(m) * factorial(n)


def jet_const(value: float, L: int) -> TaylorJet:
    c = np.zeros((L + 1, L + 1))
    c[0, 0] = value
    return TaylorJet(L, c)


def jet_var(which: str, base: float, L: int) -> TaylorJet:
    """The coordinate function x or y expanded about `base`."""
    if which not in ("x", "y"):
        raise ValueError("variable must be 'x' or 'y'")
    c = np.zeros((L + 1, L + 1))
    c[0, 0] = base
    if L >= 1:
        if which == "x":
            c[1, 0] = 1.0
        else:
            c[0, 1] = 1.0
    return TaylorJet(L, c)


def _check_pair(f: TaylorJet, g: TaylorJet) -> None:
    if f.L != g.L:
        raise ValueError("jets have different truncation degrees")


def jet_add(f: TaylorJet, g: TaylorJet) -> TaylorJet:
    _check_pair(f, g)
    return TaylorJet(f.L, f.coeffs + g.coeffs)


def jet_scale(f: TaylorJet, factor: float) -> TaylorJet:
    return TaylorJet(f.L, f.coeffs * factor)


def jet_mul(f: TaylorJet, g: TaylorJet) -> TaylorJet:
    _check_pair(f, g)
    L = f.L
    out = np.zeros((L + 1, L + 1))
    fc, gc = f.coeffs, g.coeffs
    for p in range(L + 1):
        row = fc[p]
        for q in range(L + 1):
            c = row[q]
            if c != 0.0:
                out[p:, q:] += c * gc[: L + 1 - p, : L + 1 - q]
    return TaylorJet(L, out)


def jet_recip(f: TaylorJet) -> TaylorJet:
    """1/f as a jet; the usual convolutional back-substitution."""
    c0 = f.constant
    if abs(c0) <= _DENOM_FLOOR:
        raise SingularJet("jet has (numerically) zero constant term")
    L = f.L
    fc = f.coeffs
    v = np.zeros((L + 1, L + 1))
    v[0, 0] = 1.0 / c0
    for m in range(L + 1):
        for n in range(L + 1):
            if m == 0 and n == 0:
                continue
            # v[m, n] is still zero, so the full reversed product skips
            # exactly the fc[0,0]*v[m,n] term being solved for.
            acc = np.sum(fc[: m + 1, : n + 1] * v[m::-1, n::-1])
            v[m, n] = -acc / c0
    return TaylorJet(L, v)


def kernel_jet(a: float, b: float, x0: float, y0: float, L: int = 8) -> TaylorJet:
    """Jet of the quadrature kernel about (x0, y0) for the pixel (a, b)."""
    x = jet_var("x", x0, L)
    y = jet_var("y", y0, L)
    u = jet_add(jet_add(jet_scale(x, a), jet_scale(y, -b)), jet_const(1.0, L))
    v = jet_add(jet_scale(y, a), jet_scale(x, b))
    denom = jet_add(jet_mul(u, u), jet_mul(v, v))
    if denom.constant <= _DENOM_FLOOR:
        raise SingularKernel(
            f"denominator vanishes at base ({x0},{y0}) for pixel ({a},{b})"
        )
    return jet_recip(jet_mul(denom, denom))


def derivative_scale(L: int) -> np.ndarray:
    """Matrix m! * n! converting Taylor coefficients to raw derivatives."""
    f = np.array([factorial(i) for i in range(L + 1)], dtype=float)
    return np.outer(f, f)


def kernel_matrix(a: float, b: float, x0: float, y0: float, L: int = 8) -> np.ndarray:
    """Raw derivative values H[m][n] of the kernel at the base point."""
    return kernel_jet(a, b, x0, y0, L).coeffs * derivative_scale(L)


# ---------------------------------------------------------------------------
# Batch path.
#
# As a polynomial in the offsets (X, Y) from the base point, the
# denominator is exactly
#     D = D0 + p X + q Y + s (X^2 + Y^2),   s = a^2 + b^2,
# so E = D^2 has a fixed 13-monomial support whatever the pixel.  The
# reciprocal recurrence then costs ~12 fused multiply-adds per jet
# coefficient, with every quantity a vector across the pixel batch.


def _recip_support(
    a: np.ndarray, b: np.ndarray, x0: float, y0: float
) -> tuple[np.ndarray, list[tuple[int, int, np.ndarray]]]:
    u0 = a * x0 - b * y0 + 1.0
    v0 = a * y0 + b * x0
    d0 = u0 * u0 + v0 * v0
    p = 2.0 * (a * u0 + b * v0)
    q = 2.0 * (a * v0 - b * u0)
    s = a * a + b * b
    e00 = d0 * d0
    e30 = 2.0 * p * s
    e03 = 2.0 * q * s
    e40 = s * s
    support = [
        (1, 0, 2.0 * d0 * p),
        (0, 1, 2.0 * d0 * q),
        (2, 0, p * p + 2.0 * d0 * s),
        (1, 1, 2.0 * p * q),
        (0, 2, q * q + 2.0 * d0 * s),
        (3, 0, e30),
        (2, 1, e03),
        (1, 2, e30),
        (0, 3, e03),
        (4, 0, e40),
        (2, 2, 2.0 * e40),
        (0, 4, e40),
    ]
    return e00, support


def kernel_weighted_sums(
    a: np.ndarray,
    b: np.ndarray,
    weights: np.ndarray,
    x0: float,
    y0: float,
    L: int = 8,
    chunk: int = 1 << 15,
) -> tuple[np.ndarray, int]:
    """Sum of weights[p] * kernel Taylor coefficients over pixels p.

    Returns the (L+1, L+1) matrix of weighted Taylor-coefficient sums
    (multiply by derivative_scale(L) for raw-derivative convention) and
    the number of pixels skipped for a vanishing denominator.  Chunks
    are accumulated in fixed order and combined pairwise, so the result
    is bit-stable for a given chunk size.
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    weights = np.asarray(weights, dtype=np.float64).ravel()
    if not (a.shape == b.shape == weights.shape):
        raise ValueError("a, b, weights must have identical lengths")
    parts = []
    skipped = 0
    for lo in range(0, a.size, chunk):
        part, bad = _weighted_sums_chunk(
            a[lo : lo + chunk], b[lo : lo + chunk], weights[lo : lo + chunk], x0, y0, L
        )
        parts.append(part)
        skipped += bad
    if not parts:
        return np.zeros((L + 1, L + 1)), 0
    return np.sum(np.stack(parts), axis=0), skipped


def _weighted_sums_chunk(
    a: np.ndarray, b: np.ndarray, w: np.ndarray, x0: float, y0: float, L: int
) -> tuple[np.ndarray, int]:
    e00, support = _recip_support(a, b, x0, y0)
    good = e00 > _DENOM_FLOOR
    skipped = int(np.count_nonzero(~good))
    if skipped:
        a, b, w = a[good], b[good], w[good]
        e00, support = _recip_support(a, b, x0, y0)
    out = np.zeros((L + 1, L + 1))
    if a.size == 0:
        return out, skipped
    inv_e00 = 1.0 / e00
    v = np.empty((L + 1, L + 1, a.size))
    v[0, 0] = inv_e00
    acc = np.empty_like(inv_e00)
    for m in range(L + 1):
        for n in range(L + 1):
            if m == 0 and n == 0:
                out[0, 0] = np.dot(w, v[0, 0])
                continue
            acc[:] = 0.0
            for dm, dn, coeff in support:
                if dm <= m and dn <= n:
                    acc += coeff * v[m - dm, n - dn]
            vn = v[m, n]
            np.multiply(acc, inv_e00, out=vn)
            np.negative(vn, out=vn)
            out[m, n] = np.dot(w, vn)
    return out, skipped


# ---------------------------------------------------------------------------
# Finite-difference oracle.


def kernel_matrix_fd_check(
    a: float, b: float, x0: float, y0: float, L: int = 4, step: float = 1e-4
) -> float:
    """Max deviation of jet derivatives (m+n <= 4) from central differences.

    The differences are taken in high-precision arithmetic: at step 1e-4
    a fourth difference of an O(1) function lives around 1e-16, which
    float64 cancellation would swamp completely.
    """
    import mpmath

    order = min(L, 4)
    jet = kernel_matrix(a, b, x0, y0, order)
    with mpmath.workdps(60):
        h = mpmath.mpf(step)
        am, bm = mpmath.mpf(a), mpmath.mpf(b)
        xm, ym = mpmath.mpf(x0), mpmath.mpf(y0)

        def f(x: "mpmath.mpf", y: "mpmath.mpf") -> "mpmath.mpf":
            return 1 / ((am * x - bm * y + 1) ** 2 + (am * y + bm * x) ** 2) ** 2

        samples = {
            (i, j): f(xm + i * h, ym + j * h)
            for i in range(-2, 3)
            for j in range(-2, 3)
        }
        stencils = {
            0: {0: mpmath.mpf(1)},
            1: {-1: mpmath.mpf(-0.5), 1: mpmath.mpf(0.5)},
            2: {-1: mpmath.mpf(1), 0: mpmath.mpf(-2), 1: mpmath.mpf(1)},
            3: {
                -2: mpmath.mpf(-0.5),
                -1: mpmath.mpf(1),
                1: mpmath.mpf(-1),
                2: mpmath.mpf(0.5),
            },
            4: {
                -2: mpmath.mpf(1),
                -1: mpmath.mpf(-4),
                0: mpmath.mpf(6),
                1: mpmath.mpf(-4),
                2: mpmath.mpf(1),
            },
        }
        worst = 0.0
        for m in range(order + 1):
            for n in range(order + 1 - m):
                est = mpmath.mpf(0)
                for i, ci in stencils[m].items():
                    for j, cj in stencils[n].items():
                        est += ci * cj * samples[(i, j)]
                est /= h ** (m + n)
                fd = float(est)
                dev = abs(jet[m, n] - fd) / max(abs(fd), abs(jet[m, n]), 1.0)
                worst = max(worst, dev)
    return worst
