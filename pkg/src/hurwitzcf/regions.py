"""Analyticity regions of the invariant density and digit admissibility.

The fundamental domain splits, up to the bounding circular arcs, into
twelve pieces K_{k,l} (shape index k in {1,2,3}, rotation l in {1..4})
cut out by the eight unit circles centered at the nonzero lattice
neighbors of the origin.  After a digit a, the next remainder is
confined to K minus a small union of those discs; the finitely many
unions that arise form a 13-state automaton (the full square plus three
shapes times four rotations) that determines which digit may follow
which.  Twelve digit values can land in either of two states depending
on context and carry a mark to record which; over the marked alphabet,
admissibility is a property of consecutive pairs only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .core import (
    DomainError,
    GaussianInt,
    I,
    ONE,
    in_fundamental_domain,
    is_digit,
    nearest_gaussian,
)
from .dynamics import DEFAULT_SEED

#: Circle-membership tolerance: points within this distance of a defining
#: arc are reported as Boundary (None) rather than assigned to a region.
BOUNDARY_EPS = 1e-12

#: Digit values that occur with two distinct follow-up states and hence
#: exist in marked and unmarked form.
MARKABLE_VALUES = frozenset(
    GaussianInt(sr * a, si * b)
    for a, b in ((2, 1), (1, 2), (2, 2))
    for sr in (1, -1)
    for si in (1, -1)
)


class IllegalMark(ValueError):
    """Digit mark used on a value that only ever has one follow-up state."""


class NotAdmissible(ValueError):
    """Digit cannot follow the given automaton state."""


@dataclass(frozen=True, slots=True)
class Digit:
    """Digit of the marked alphabet: a value in G plus an optional mark."""

    value: GaussianInt
    marked: bool = False

    def __post_init__(self) -> None:
        if not is_digit(self.value):
            raise DomainError(f"{self.value} is not a digit (0 and units excluded)")
        if self.marked and self.value not in MARKABLE_VALUES:
            raise IllegalMark(f"{self.value} has no marked variant")

    def __str__(self) -> str:
        return f"{self.value}'" if self.marked else str(self.value)


@dataclass(frozen=True, slots=True)
class RegionId:
    """Identifier K_{k,l} of one analytic piece of the density."""

    k: int
    l: int

    def __post_init__(self) -> None:
        if self.k not in (1, 2, 3) or self.l not in (1, 2, 3, 4):
            raise DomainError(f"no region K_{{{self.k},{self.l}}}")

    @property
    def code(self) -> int:
        """Dense index 0..11; classify_batch emits the same codes."""
        return (self.k - 1) * 4 + (self.l - 1)

    @classmethod
    def from_code(cls, code: int) -> "RegionId":
        return cls(code // 4 + 1, code % 4 + 1)

    def __str__(self) -> str:
        return f"K{self.k},{self.l}"


ALL_REGIONS = tuple(RegionId.from_code(c) for c in range(12))


def rotate_region(r: RegionId, j: int) -> RegionId:
    """Region containing i^j * z for z in r (dual points rotate by (-i)^j)."""
    return RegionId(r.k, (r.l - 1 + j) % 4 + 1)


# ---------------------------------------------------------------------------
# Geometry: classification of points of K into the twelve regions.
#
# Membership only involves the eight unit circles |z - c| = 1 with c a
# lattice neighbor of 0.  Center order: +1, -1, +i, -i, then diagonals
# 1+i, 1-i, -1+i, -1-i.

_CENTERS = np.array(
    [1, -1, 1j, -1j, 1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j], dtype=np.complex128
)

# Per rotation l (0-based), indices into _CENTERS of the defining circles:
#   K_{1,l}: inside the corner disc _CORNER[l]
#   K_{2,l}: outside that corner disc, inside both _AXIS[l] and _AXIS2[l]
#   K_{3,l}: inside _AXIS[l], outside the two perpendicular axis discs
_CORNER = (7, 5, 4, 6)  # -1-i, 1-i, 1+i, -1+i
_AXIS = (1, 3, 0, 2)  # -1, -i, +1, +i
_AXIS2 = (3, 0, 2, 1)  # -i, +1, +i, -1


def classify(z: complex, eps: float = BOUNDARY_EPS) -> RegionId | None:
    """Region of z in K, or None when z is within eps of a defining arc.

    A point inside a corner disc always belongs to the k = 1 region of
    that corner; no corner disc meets a non-adjacent axis disc inside K,
    so checking corners first is equivalent to the full case analysis.
    """
    if not in_fundamental_domain(z):
        raise DomainError(f"{z!r} is outside the fundamental domain")
    d = np.abs(z - _CENTERS)
    if np.any(np.abs(d - 1.0) <= eps):
        return None
    inside = d < 1.0
    for l in range(4):
        if inside[_CORNER[l]]:
            return RegionId(1, l + 1)
    for l in range(4):
        if inside[_AXIS[l]] and inside[_AXIS2[l]]:
            return RegionId(2, l + 1)
    for l in range(4):
        if (
            inside[_AXIS[l]]
            and not inside[_AXIS2[l]]
            and not inside[_AXIS2[(l + 2) % 4]]
        ):
            return RegionId(3, l + 1)
    return None


def classify_batch(z: np.ndarray, eps: float = BOUNDARY_EPS) -> np.ndarray:
    """Vectorized classify: int8 RegionId codes, -1 for boundary points."""
    x = z.real[..., None] - _CENTERS.real
    y = z.imag[..., None] - _CENTERS.imag
    d = np.sqrt(x * x + y * y)
    boundary = np.any(np.abs(d - 1.0) <= eps, axis=-1)
    inside = d < 1.0
    out = np.full(z.shape, -1, dtype=np.int8)
    unset = ~boundary
    for l in range(4):
        corner = inside[..., _CORNER[l]]
        np.copyto(out, np.int8(l), where=unset & corner)
        unset &= ~corner
    for l in range(4):
        two = inside[..., _AXIS[l]] & inside[..., _AXIS2[l]]
        np.copyto(out, np.int8(4 + l), where=unset & two)
        unset &= ~two
    for l in range(4):
        three = (
            inside[..., _AXIS[l]]
            & ~inside[..., _AXIS2[l]]
            & ~inside[..., _AXIS2[(l + 2) % 4]]
        )
        np.copyto(out, np.int8(8 + l), where=unset & three)
        unset &= ~three
    return out


# ---------------------------------------------------------------------------
# The admissibility automaton.
#
# Each state is "K minus the union of unit discs centered at S" for a set
# S of lattice neighbors; S = {} is the full square.  Under z -> 1/z an
# axis circle becomes a tile-aligned half-plane boundary (the inversion
# conjugates, so imaginary-axis circles swap sides) and a diagonal circle
# becomes the circle at the conjugate center.  Translating by the digit
# then yields the rule below.  A corner disc is dropped whenever an
# adjacent axis disc is present (its intersection with K is contained in
# the axis disc's), which is what keeps the state count at thirteen.

_UNIT_VALUES = (ONE, -ONE, I, -I)


def _canonical(discs: frozenset[GaussianInt]) -> frozenset[GaussianInt]:
    axes = {c for c in discs if c.norm() == 1}
    keep = set(axes)
    for c in discs:
        if c.norm() == 2:
            if GaussianInt(c.re, 0) in axes or GaussianInt(0, c.im) in axes:
                continue
            keep.add(c)
    return frozenset(keep)


def _transition(
    discs: frozenset[GaussianInt], v: GaussianInt
) -> frozenset[GaussianInt] | None:
    """Follow-up disc set after digit value v, or None if v is not allowed."""
    for c in discs:
        if c.norm() == 1:
            if c.re and v.re * c.re > 0:
                return None
            if c.im and v.im * c.im < 0:
                return None
        elif v == c.conj():
            return None
    new = set()
    for g in _UNIT_VALUES:
        c = g - v
        if 1 <= c.norm() <= 2:
            new.add(c)
    for c in discs:
        if c.norm() == 2:
            d = c.conj() - v
            if 1 <= d.norm() <= 2:
                new.add(d)
    return _canonical(frozenset(new))


@dataclass(frozen=True, slots=True)
class SubregionId:
    """Automaton state: FULL, or shape family 1..3 with rotation 0..3."""

    family: int
    rotation: int

    def __post_init__(self) -> None:
        if self.family not in (0, 1, 2, 3):
            raise DomainError(f"bad subregion family {self.family}")
        if self.rotation not in (0, 1, 2, 3) or (
            self.family == 0 and self.rotation != 0
        ):
            raise DomainError(f"bad subregion rotation {self.rotation}")

    @property
    def discs(self) -> frozenset[GaussianInt]:
        """Disc centers removed from K in this state."""
        return _DISCS_BY_STATE[self]

    def __str__(self) -> str:
        return "FULL" if self.family == 0 else f"S{self.family}({self.rotation})"


FULL = SubregionId(0, 0)


def _ipow(j: int) -> GaussianInt:
    out = ONE
    for _ in range(j % 4):
        out = out * I
    return out


_DISCS_BY_STATE: dict[SubregionId, frozenset[GaussianInt]] = {FULL: frozenset()}
for _r in range(4):
    _rot = _ipow(_r)
    _DISCS_BY_STATE[SubregionId(1, _r)] = frozenset({_rot * -ONE})
    _DISCS_BY_STATE[SubregionId(2, _r)] = frozenset({_rot * GaussianInt(-1, -1)})
    _DISCS_BY_STATE[SubregionId(3, _r)] = frozenset({_rot * -ONE, _rot * -I})

_STATE_BY_DISCS = {v: k for k, v in _DISCS_BY_STATE.items()}

ALL_SUBREGIONS = tuple(_DISCS_BY_STATE)

_PROBE_VALUES = tuple(
    GaussianInt(a, b)
    for a in range(-4, 5)
    for b in range(-4, 5)
    if a * a + b * b > 1
)


def _reachable_states() -> set[frozenset[GaussianInt]]:
    seen = {frozenset()}
    frontier: list[frozenset[GaussianInt]] = [frozenset()]
    while frontier:
        state = frontier.pop()
        for v in _PROBE_VALUES:
            nxt = _transition(state, v)
            if nxt is not None and nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


def _build_marked_map() -> dict[GaussianInt, frozenset[GaussianInt]]:
    """For each markable value, the non-default follow-up disc set."""
    out: dict[GaussianInt, frozenset[GaussianInt]] = {}
    for v in _PROBE_VALUES:
        default = _transition(frozenset(), v)
        alternates = set()
        for discs in _DISCS_BY_STATE.values():
            t = _transition(discs, v)
            if t is not None and t != default:
                alternates.add(t)
        if alternates:
            if len(alternates) != 1 or v not in MARKABLE_VALUES:
                raise AssertionError(f"unexpected mark structure at {v}")
            out[v] = next(iter(alternates))
    if set(out) != set(MARKABLE_VALUES):
        raise AssertionError("markable value set does not match the automaton")
    return out


# Startup self-check: the reachable state set must be exactly the thirteen
# named ones, and exactly the twelve markable values must be two-faced.
if _reachable_states() != set(_DISCS_BY_STATE.values()):
    raise AssertionError("automaton states do not close over the named set")
_MARKED_STATE = _build_marked_map()


def digit_region(d: Digit) -> SubregionId:
    """Automaton state the remainder enters after digit d."""
    if d.marked:
        return _STATE_BY_DISCS[_MARKED_STATE[d.value]]
    t = _transition(frozenset(), d.value)
    assert t is not None  # every digit is allowed after the full square
    return _STATE_BY_DISCS[t]


def next_subregion(current: SubregionId, d: Digit) -> SubregionId:
    """State after reading d from `current`; the digit determines it alone."""
    if _transition(current.discs, d.value) is None:
        raise NotAdmissible(f"{d} cannot follow a digit with state {current}")
    return digit_region(d)


class SuccessorSet:
    """Digits allowed to follow a given digit, marks forced by the pair."""

    __slots__ = ("state",)

    def __init__(self, state: SubregionId):
        self.state = state

    def __contains__(self, d: Digit) -> bool:
        t = _transition(self.state.discs, d.value)
        if t is None:
            return False
        return d.marked == (t != _transition(frozenset(), d.value))

    __call__ = __contains__

    def sample(self, bound: int = 4) -> list[Digit]:
        """All members with |Re|, |Im| <= bound, for tests and display."""
        out = []
        for a in range(-bound, bound + 1):
            for b in range(-bound, bound + 1):
                v = GaussianInt(a, b)
                if not is_digit(v):
                    continue
                for marked in (False, True):
                    if marked and v not in MARKABLE_VALUES:
                        continue
                    d = Digit(v, marked)
                    if d in self:
                        out.append(d)
        return out


def successor_set(d: Digit) -> SuccessorSet:
    """Admissible followers of d."""
    return SuccessorSet(digit_region(d))


def is_admissible(word: Sequence[Digit]) -> bool:
    """True iff every consecutive pair of the word passes successor_set."""
    for prev, cur in zip(word, word[1:]):
        if cur not in successor_set(prev):
            return False
    return True


def mark_for(state: SubregionId, value: GaussianInt) -> bool:
    """Mark the automaton assigns to `value` read from `state`."""
    t = _transition(state.discs, value)
    if t is None:
        raise NotAdmissible(f"{value} cannot follow state {state}")
    return t != _transition(frozenset(), value)


def orbit_digits(
    z0: complex = DEFAULT_SEED, steps: int = 0
) -> Iterator[tuple[Digit, complex, SubregionId]]:
    """Walk an orbit emitting (marked digit, remainder, new state).

    The mark is chosen from the tracked state; if the digit is not even
    value-admissible (which would be a genuine violation downstream
    checks should see), the unmarked variant is emitted.
    """
    state = FULL
    z = z0
    for _ in range(steps):
        if abs(z) < 1e-15:
            return
        u = 1.0 / z
        value = nearest_gaussian(u)
        t = _transition(state.discs, value)
        marked = t is not None and t != _transition(frozenset(), value)
        d = Digit(value, marked)
        z = u - complex(value)
        state = digit_region(d)
        yield d, z, state


def count_orbit_violations(
    z0: complex = DEFAULT_SEED, steps: int = 0, geom_eps: float = 1e-9
) -> tuple[int, int]:
    """(successor violations, geometry violations) along an orbit.

    Successor violations count consecutive digit pairs rejected by
    successor_set; geometry violations count remainders that enter one
    of the discs their own state excludes by more than geom_eps.
    """
    bad_pairs = 0
    bad_geometry = 0
    prev: Digit | None = None
    for d, z, state in orbit_digits(z0, steps):
        if prev is not None and d not in successor_set(prev):
            bad_pairs += 1
        for c in state.discs:
            if abs(z - complex(c)) < 1.0 - geom_eps:
                bad_geometry += 1
                break
        prev = d
    return bad_pairs, bad_geometry


# ---------------------------------------------------------------------------
# Dual-region translate table.
#
# The preimage of the dual region V_{1,1} under the extension is bounded
# by translated copies V_{k,l} + alpha; pushing the current w through
# 1/(w + alpha) for each listed alpha traces the boundary of V_{1,1}
# directly, which saturates a raster far faster than waiting for the
# orbit itself to visit every boundary pixel.

_ALPHA_TABLE: dict[tuple[int, int], tuple[GaussianInt, ...]] = {
    (1, 1): (GaussianInt(-1, 2),),
    (2, 1): (GaussianInt(-2, 1), GaussianInt(-2, 2), GaussianInt(-1, 3)),
    (3, 1): (GaussianInt(-2, 0),),
    (1, 2): (GaussianInt(2, 2),),
    # the (2,2) row is self-paired under the diagonal symmetry
    # u -> i*conj(u) of the inverted target region, which forces the set
    # to be closed under a -> i*conj(a); {1+3i, 2+3i} are the mirror
    # partners of {3+i, 3+2i}
    (2, 2): (
        GaussianInt(1, 3),
        GaussianInt(2, 3),
        GaussianInt(3, 2),
        GaussianInt(3, 1),
    ),
    (3, 2): (GaussianInt(0, 3),),
    (1, 3): (GaussianInt(2, -1),),
    (2, 3): (GaussianInt(1, -2), GaussianInt(2, -2), GaussianInt(3, -1)),
    (3, 3): (GaussianInt(3, 0),),
    (1, 4): (GaussianInt(-1, -1),),
    (2, 4): (GaussianInt(-1, -2), GaussianInt(-2, -1)),
    (3, 4): (GaussianInt(0, -2),),
}


def alpha_translates(r: RegionId) -> tuple[GaussianInt, ...]:
    """Translates alpha with V_{k,l} + alpha on the boundary of 1/V_{1,1}."""
    return _ALPHA_TABLE[(r.k, r.l)]
