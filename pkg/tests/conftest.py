"""Shared fixtures: raster banks are expensive, so they are session scoped.

The acceptance module records one line per criterion; the terminal
summary hook replays them after the run so the verdicts are visible
even when every test passes.
"""

from __future__ import annotations

import time
from types import SimpleNamespace

import pytest
from hypothesis import settings

from hurwitzcf.estimator import DensityEvaluator, estimate_coeffs_detailed
from hurwitzcf.pixelgrid import (
    PixelGrid,
    fill_mirror,
    fill_symmetry,
    flood_fill,
    pool_rotations,
    populate_boundary,
    populate_many,
    populate_orbit,
    rotate_grid,
)
from hurwitzcf.regions import RegionId

settings.register_profile("suite", deadline=None, max_examples=50)
settings.load_profile("suite")

CORNER_KS = (7, 8, 9, 10, 11)


def pytest_configure(config):
    config._criterion_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_criterion_lines", None)
    if lines:
        terminalreporter.section("acceptance summary")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def criterion_lines(request):
    return request.config._criterion_lines


@pytest.fixture(scope="session")
def corner_bank():
    """Boundary-variant V(1,1) rasters and derivative tables, k = 7..11.

    seconds covers build + fill + estimation for that k, so the runtime
    criterion can be checked without a second build.
    """
    bank = {}
    for k in CORNER_KS:
        t0 = time.perf_counter()
        g = PixelGrid(k, RegionId(1, 1))
        populate_boundary(g)
        gf = flood_fill(fill_symmetry(g))
        matrix, skipped = estimate_coeffs_detailed(gf, -0.5, -0.5, 4)
        bank[k] = SimpleNamespace(
            grid=gf,
            matrix=matrix,
            skipped=skipped,
            seconds=time.perf_counter() - t0,
        )
    return bank


@pytest.fixture(scope="session")
def axis_bank():
    """Orbit-variant V(2,1) derivative tables at base 0, k = 7..10."""
    bank = {}
    for k in (7, 8, 9, 10):
        g = PixelGrid(k, RegionId(2, 1))
        populate_orbit(g)
        gf = flood_fill(fill_symmetry(g))
        matrix, _ = estimate_coeffs_detailed(gf, 0.0, 0.0, 2)
        bank[k] = SimpleNamespace(grid=gf, matrix=matrix)
    return bank


def _twelve(k: int) -> list[PixelGrid]:
    grids = [PixelGrid(k, RegionId.from_code(c)) for c in range(12)]
    populate_many(grids, iterations=100 * (1 << k) * (1 << k))
    final: list[PixelGrid] = []
    for fam in (1, 2, 3):
        canon = pool_rotations([g for g in grids if g.region.k == fam])
        closed = fill_symmetry(canon) if fam in (1, 2) else fill_mirror(canon, "b=0")
        filled = flood_fill(closed)
        for j in range(4):
            final.append(rotate_grid(filled, j) if j else filled)
    return final


@pytest.fixture(scope="session")
def twelve_k7():
    """Cheap full bank for unit tests of the evaluator."""
    return _twelve(7)


@pytest.fixture(scope="session")
def twelve_k9():
    """Production-resolution bank for the functional-equation checks."""
    return _twelve(9)


@pytest.fixture(scope="session")
def evaluator_k9(twelve_k9):
    return DensityEvaluator(twelve_k9)
