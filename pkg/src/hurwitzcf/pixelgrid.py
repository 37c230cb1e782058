"""Bit-packed rasterization of the dual regions V_{k,l}.

A grid covers [-1,1]^2 with 2Q x 2Q pixels, Q = 2^k; pixel (i,j)
(1-based) is the square [(i-1)/Q - 1, i/Q - 1] x [(j-1)/Q - 1, j/Q - 1].
Pixels are marked by streaming the second coordinate of the natural
extension orbit (populate_orbit), or much faster by tracing the region
boundary through the translate table (populate_boundary), then repaired
with symmetry closure, neighbor voting, or an exterior flood fill.

Storage is one bit per pixel: row r holds pixel i = r+1, bit c within
the row (little-endian inside each byte) holds pixel j = c+1.  A k = 13
grid is 32 MiB; fills unpack to byte masks transiently.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .core import DomainError
from .dynamics import NatExtState, DEFAULT_SEED, orbit_chunks
from .regions import RegionId, alpha_translates, classify_batch, rotate_region


class IndexOutOfRange(IndexError):
    """Pixel coordinates outside 1..2Q."""


class OutOfRange(ValueError):
    """Point outside the raster square [-1,1]^2."""


class SymmetryUnsupported(ValueError):
    """Region is not symmetric about the axis the operation assumes."""


class FormatError(ValueError):
    """Grid file is not a well-formed HCFGRID v1 payload."""


IoError = OSError

_POPCOUNT = np.array([bin(v).count("1") for v in range(256)], dtype=np.uint16)

# Regions whose dual is symmetric under conjugate-negation (the b = -a
# mirror); the dual of K_{3,1} is symmetric under plain conjugation
# (b = 0) instead, and rotated regions have rotated axes.
_ANTIDIAG_REGIONS = frozenset({(1, 1), (2, 1)})


class PixelGrid:
    """2Q x 2Q bitmap over [-1,1]^2 tagged with the region it rasterizes."""

    __slots__ = ("k", "Q", "region", "_bits")

    def __init__(self, k: int, region: RegionId, _bits: np.ndarray | None = None):
        if not 1 <= k <= 16:
            raise DomainError(f"resolution exponent k={k} outside 1..16")
        self.k = int(k)
        self.Q = 1 << self.k
        self.region = region
        shape = (2 * self.Q, self._row_bytes())
        if _bits is None:
            self._bits = np.zeros(shape, dtype=np.uint8)
        else:
            if _bits.shape != shape or _bits.dtype != np.uint8:
                raise DomainError("payload shape does not match k")
            self._bits = _bits

    def _row_bytes(self) -> int:
        return (2 * self.Q + 7) // 8

    @property
    def cells(self) -> np.ndarray:
        """Unpacked boolean view, cells[i-1, j-1]; a copy, not a view."""
        return (
            np.unpackbits(self._bits, axis=1, count=2 * self.Q, bitorder="little")
            .astype(bool)
        )

    def _from_cells(self, cells: np.ndarray) -> "PixelGrid":
        bits = np.packbits(cells, axis=1, bitorder="little")
        return PixelGrid(self.k, self.region, _bits=bits)

    def get(self, i: int, j: int) -> bool:
        self._check_index(i, j)
        return bool(self._bits[i - 1, (j - 1) >> 3] & (1 << ((j - 1) & 7)))

    def set(self, i: int, j: int, value: bool = True) -> None:
        self._check_index(i, j)
        mask = np.uint8(1 << ((j - 1) & 7))
        if value:
            self._bits[i - 1, (j - 1) >> 3] |= mask
        else:
            self._bits[i - 1, (j - 1) >> 3] &= np.uint8(~mask & 0xFF)

    def _check_index(self, i: int, j: int) -> None:
        if not (1 <= i <= 2 * self.Q and 1 <= j <= 2 * self.Q):
            raise IndexOutOfRange(f"pixel ({i},{j}) outside 1..{2 * self.Q}")

    def count(self) -> int:
        return int(_POPCOUNT[self._bits].sum(dtype=np.int64))

    def occupancy(self) -> float:
        return self.count() / float(4 * self.Q * self.Q)

    def copy(self) -> "PixelGrid":
        return PixelGrid(self.k, self.region, _bits=self._bits.copy())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PixelGrid):
            return NotImplemented
        return (
            self.k == other.k
            and self.region == other.region
            and np.array_equal(self._bits, other._bits)
        )

    def __repr__(self) -> str:
        return (
            f"PixelGrid(k={self.k}, region={self.region}, "
            f"occupied={self.count()})"
        )


def pixel_center(g: PixelGrid, i: int, j: int) -> complex:
    """Center of pixel (i,j): (i/Q - 1/(2Q) - 1) + (j/Q - 1/(2Q) - 1)i."""
    g._check_index(i, j)
    q = g.Q
    return complex((i - 0.5) / q - 1.0, (j - 0.5) / q - 1.0)


def pixel_index(g: PixelGrid, w: complex) -> tuple[int, int]:
    """Pixel containing w; coordinates exactly +-1 clamp to the edge pixel."""
    if abs(w.real) > 1.0 or abs(w.imag) > 1.0:
        raise OutOfRange(f"{w!r} outside [-1,1]^2")
    q = g.Q
    i = min(max(int(np.floor((w.real + 1.0) * q)) + 1, 1), 2 * q)
    j = min(max(int(np.floor((w.imag + 1.0) * q)) + 1, 1), 2 * q)
    return i, j


def _scatter(g: PixelGrid, w: np.ndarray) -> None:
    """Mark the pixels containing each point of w (clamped to the square)."""
    if w.size == 0:
        return
    q = g.Q
    r = np.clip(np.floor((w.real + 1.0) * q).astype(np.int64), 0, 2 * q - 1)
    c = np.clip(np.floor((w.imag + 1.0) * q).astype(np.int64), 0, 2 * q - 1)
    np.bitwise_or.at(g._bits, (r, c >> 3), np.uint8(1) << (c & 7).astype(np.uint8))


def populate_many(
    grids: list[PixelGrid],
    seed: NatExtState | None = None,
    iterations: int = 0,
) -> list[int]:
    """Drive one orbit and scatter w into every grid whose region z visits.

    Sharing the orbit across grids (different regions and resolutions)
    is what makes multi-table runs affordable; results are identical to
    populating each grid separately with the same seed and budget.
    """
    if seed is None:
        seed = NatExtState(DEFAULT_SEED, 0j)
    if iterations > 0:
        codes = [g.region.code for g in grids]
        for zs, ws in orbit_chunks(seed.z, seed.w, iterations):
            zcodes = classify_batch(zs)
            for g, code in zip(grids, codes):
                _scatter(g, ws[zcodes == code])
    return [g.count() for g in grids]


def populate_orbit(
    g: PixelGrid, seed: NatExtState | None = None, iterations: int | None = None
) -> int:
    """Mark pixels visited by w while z is inside g.region; returns count."""
    if iterations is None:
        iterations = 100 * g.Q * g.Q
    return populate_many([g], seed, iterations)[0]


def _widen(g: PixelGrid) -> None:
    """Grow the set pixels by their edge-adjacent neighbours, in place."""
    cells = g.cells
    out = cells.copy()
    out[1:, :] |= cells[:-1, :]
    out[:-1, :] |= cells[1:, :]
    out[:, 1:] |= cells[:, :-1]
    out[:, :-1] |= cells[:, 1:]
    g._bits[...] = np.packbits(out, axis=1, bitorder="little")


def populate_boundary(
    g: PixelGrid, seed: NatExtState | None = None, iterations: int | None = None
) -> int:
    """Trace the boundary of V_{1,1} through the translate table.

    Each orbit state contributes the points 1/(w + alpha) for the
    translates alpha attached to the region currently holding z; these
    lie on the boundary of V_{1,1}, so ~3 Q^2 steps outline the region
    that direct sampling needs ~100 Q^2 steps to fill.  Boundary-band
    grids are meant to be completed by flood_fill.

    Every sampled point marks the pixel containing it plus that pixel's
    four edge neighbours.  The image pieces are thin slivers near the
    region boundary, and a single-pixel raster of finitely many samples
    leaves sub-pixel gaps that flood_fill then leaks through; the
    edge-neighbour cover makes the band airtight at the default budget
    and is part of the raster's definition (the reference column values
    carry the same cover), not a tunable smoothing step.
    """
    if g.region != RegionId(1, 1):
        raise DomainError("translate table traces V_{1,1}; build other regions by rotation")
    if seed is None:
        seed = NatExtState(DEFAULT_SEED, 0j)
    if iterations is None:
        iterations = 3 * g.Q * g.Q
    if iterations <= 0:
        return g.count()
    alphas = {
        r.code: np.array(
            [complex(a) for a in alpha_translates(r)], dtype=np.complex128
        )
        for r in (RegionId.from_code(c) for c in range(12))
    }
    for zs, ws in orbit_chunks(seed.z, seed.w, iterations):
        zcodes = classify_batch(zs)
        for code, alpha in alphas.items():
            w_sel = ws[zcodes == code]
            if w_sel.size:
                _scatter(g, (1.0 / (w_sel[:, None] + alpha[None, :])).ravel())
    # One dilation of the union equals splatting each point on arrival.
    _widen(g)
    return g.count()


# ---------------------------------------------------------------------------
# Hole repair.


def fill_symmetry(g: PixelGrid) -> PixelGrid:
    """Close the grid under the anti-diagonal mirror (i,j) ~ (2Q+1-j, 2Q+1-i)."""
    if (g.region.k, g.region.l) not in _ANTIDIAG_REGIONS:
        raise SymmetryUnsupported(
            f"{g.region} is not symmetric about b = -a; see fill_mirror"
        )
    cells = g.cells
    return g._from_cells(cells | cells[::-1, ::-1].T)


def fill_mirror(g: PixelGrid, axis: str) -> PixelGrid:
    """Closure under an axis mirror: one of 'b=-a', 'b=a', 'b=0', 'a=0'."""
    cells = g.cells
    if axis == "b=-a":
        mirrored = cells[::-1, ::-1].T
    elif axis == "b=a":
        mirrored = cells.T
    elif axis == "b=0":
        mirrored = cells[:, ::-1]
    elif axis == "a=0":
        mirrored = cells[::-1, :]
    else:
        raise DomainError(f"unknown mirror axis {axis!r}")
    return g._from_cells(cells | mirrored)


def fill_neighbors(g: PixelGrid) -> PixelGrid:
    """One voting pass: a pixel turns true if all four neighbors are true."""
    cells = g.cells
    n = cells.shape[0]
    up = np.zeros_like(cells)
    down = np.zeros_like(cells)
    left = np.zeros_like(cells)
    right = np.zeros_like(cells)
    up[1:, :] = cells[:-1, :]
    down[:-1, :] = cells[1:, :]
    left[:, 1:] = cells[:, :-1]
    right[:, :-1] = cells[:, 1:]
    return g._from_cells(cells | (up & down & left & right))


def _exterior_py(blocked: np.ndarray, ext: np.ndarray) -> None:
    """Scanline fill of the false-region component of (0,0), into ext.

    Explicit segment stack, no recursion.  blocked and ext are uint8.
    """
    n = blocked.shape[0]
    if blocked[0, 0]:
        return
    cap = 4096
    stack_r = np.empty(cap, np.int64)
    stack_c = np.empty(cap, np.int64)
    stack_r[0] = 0
    stack_c[0] = 0
    top = 1
    while top > 0:
        top -= 1
        r = stack_r[top]
        c = stack_c[top]
        if ext[r, c] or blocked[r, c]:
            continue
        lo = c
        while lo > 0 and blocked[r, lo - 1] == 0 and ext[r, lo - 1] == 0:
            lo -= 1
        hi = c
        while hi + 1 < n and blocked[r, hi + 1] == 0 and ext[r, hi + 1] == 0:
            hi += 1
        for cc in range(lo, hi + 1):
            ext[r, cc] = 1
        for dr in (-1, 1):
            rr = r + dr
            if rr < 0 or rr >= n:
                continue
            cc = lo
            while cc <= hi:
                if blocked[rr, cc] == 0 and ext[rr, cc] == 0:
                    start = cc
                    while cc <= hi and blocked[rr, cc] == 0 and ext[rr, cc] == 0:
                        cc += 1
                    if top == cap:
                        cap *= 2
                        grown_r = np.empty(cap, np.int64)
                        grown_r[:top] = stack_r[:top]
                        stack_r = grown_r
                        grown_c = np.empty(cap, np.int64)
                        grown_c[:top] = stack_c[:top]
                        stack_c = grown_c
                    stack_r[top] = rr
                    stack_c[top] = start
                    top += 1
                else:
                    cc += 1


try:
    from numba import njit

    _exterior = njit(cache=True)(_exterior_py)
except ImportError:  # pragma: no cover - exercised only without numba
    _exterior = _exterior_py


def flood_fill(g: PixelGrid) -> PixelGrid:
    """Negate the exterior-connected empty region (4-connected from (1,1)).

    With a populated boundary band this fills every interior hole; with
    gaps in the band the fill leaks and under-fills, which is inherent
    to the method rather than guarded against here.
    """
    blocked = g.cells.astype(np.uint8)
    ext = np.zeros_like(blocked)
    _exterior(blocked, ext)
    return g._from_cells(ext == 0)


def flood_fill_symmetric(g: PixelGrid) -> PixelGrid:
    """Symmetry-closure then flood: the fill the boundary variant needs.

    Symmetrizing first lets the traced half of the boundary band seal
    the mirrored half before the exterior is computed.
    """
    return flood_fill(fill_symmetry(g))


def rotate_grid(g: PixelGrid, j: int = 1) -> PixelGrid:
    """Grid of the rotated region: w in V_{k,l} puts -i^j w in V_{k,l+j}."""
    cells = g.cells
    for _ in range(j % 4):
        cells = cells.T[:, ::-1]
    bits = np.packbits(cells, axis=1, bitorder="little")
    return PixelGrid(g.k, rotate_region(g.region, j), _bits=bits)


def pool_rotations(grids: list[PixelGrid]) -> PixelGrid:
    """Union of the four rotations of one shape family onto rotation l=1.

    Orbit samples landing in any V_{k,l} are evidence for all four, so
    pooling them quadruples the sample density of the canonical grid.
    """
    if len(grids) != 4 or len({g.region.k for g in grids}) != 1:
        raise DomainError("expected the four rotations of one shape family")
    if {g.region.l for g in grids} != {1, 2, 3, 4} or len({g.k for g in grids}) != 1:
        raise DomainError("expected one grid per rotation at a single resolution")
    acc = None
    for g in grids:
        turned = rotate_grid(g, (1 - g.region.l) % 4)
        acc = turned if acc is None else PixelGrid(
            turned.k, turned.region, _bits=acc._bits | turned._bits
        )
    return acc


def downsample(g: PixelGrid) -> PixelGrid:
    """Half-resolution grid; a coarse pixel is the OR of its 2x2 block."""
    if g.k < 2:
        raise DomainError("cannot downsample below k=1")
    cells = g.cells
    coarse = cells[::2, ::2] | cells[1::2, ::2] | cells[::2, 1::2] | cells[1::2, 1::2]
    bits = np.packbits(coarse, axis=1, bitorder="little")
    return PixelGrid(g.k - 1, g.region, _bits=bits)


# ---------------------------------------------------------------------------
# Grid files.

_HEADER_RE = re.compile(rb"\AHCFGRID v1 k=(\d{1,2}) region=K([123]),([1-4])\n")


def save_grid(g: PixelGrid, path: str) -> None:
    header = f"HCFGRID v1 k={g.k} region=K{g.region.k},{g.region.l}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(g._bits.tobytes())


def load_grid(path: str) -> PixelGrid:
    with open(path, "rb") as fh:
        blob = fh.read()
    m = _HEADER_RE.match(blob)
    if not m:
        raise FormatError("missing or malformed HCFGRID v1 header")
    k = int(m.group(1))
    if not 1 <= k <= 16:
        raise FormatError(f"unsupported resolution k={k}")
    region = RegionId(int(m.group(2)), int(m.group(3)))
    q = 1 << k
    row_bytes = (2 * q + 7) // 8
    payload = blob[m.end() :]
    if len(payload) != 2 * q * row_bytes:
        raise FormatError(
            f"payload is {len(payload)} bytes, expected {2 * q * row_bytes} for k={k}"
        )
    bits = np.frombuffer(payload, dtype=np.uint8).reshape(2 * q, row_bytes).copy()
    if 2 * q % 8:
        bits[:, -1] &= np.uint8((1 << (2 * q % 8)) - 1)
    return PixelGrid(k, region, _bits=bits)


def export_pbm(g: PixelGrid, path: str) -> None:
    """Plain PBM (P4); true pixels are black, row 1 at the top."""
    n = 2 * g.Q
    cells = g.cells
    packed = np.packbits(cells, axis=1, bitorder="big")
    with open(path, "wb") as fh:
        fh.write(f"P4\n{n} {n}\n".encode("ascii"))
        fh.write(packed.tobytes())
