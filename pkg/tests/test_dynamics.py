from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from exact_cf import (
    QI,
    determinant_is_unit,
    error_bound_holds,
    exact_expansion,
    growth_holds,
)
from hurwitzcf.core import DomainError, GaussianInt, in_fundamental_domain
from hurwitzcf.dynamics import (
    DEFAULT_SEED,
    LengthMismatch,
    NatExtState,
    OrbitTerminated,
    check_approximation,
    convergents,
    expand,
    gauss_step,
    invariance_residual,
    natext_step,
    orbit_chunks,
)

interior_points = st.builds(
    complex,
    st.floats(-0.49, 0.49),
    st.floats(-0.49, 0.49),
).filter(lambda z: abs(z) > 1e-3)


class TestGaussStep:
    def test_zero_terminates(self):
        assert gauss_step(0j) is None

    def test_outside_domain_rejected(self):
        with pytest.raises(DomainError):
            gauss_step(0.6 + 0j)

    def test_exact_inverse(self):
        # 1/(0.4 - 0.2i) = 2 + i exactly, so the remainder vanishes
        step = gauss_step(0.4 - 0.2j)
        assert step.digit == GaussianInt(2, 1)
        assert step.remainder == 0j

    @given(interior_points)
    def test_step_decomposition(self, z):
        step = gauss_step(z)
        if step is None:
            return
        u = 1.0 / z
        assert complex(step.digit) == pytest.approx(u - step.remainder, abs=1e-9)
        if step.remainder != 0j:
            assert in_fundamental_domain(step.remainder)


class TestExpand:
    def test_dyadic_terminates(self):
        steps = expand(0.25 + 0j, 10)
        assert [s.digit for s in steps] == [GaussianInt(4, 0)]
        assert steps[-1].remainder == 0j

    def test_zero_gives_empty(self):
        assert expand(0j, 5) == []

    def test_respects_max_steps(self):
        assert len(expand(DEFAULT_SEED, 6)) == 6

    @given(interior_points)
    def test_backward_reconstruction(self, z):
        steps = expand(z, 10)
        if not steps:
            return
        value = steps[-1].remainder
        for s in reversed(steps):
            value = 1.0 / (complex(s.digit) + value)
        assert value == pytest.approx(z, abs=1e-9)


class TestConvergents:
    def test_seed_values(self):
        # a single digit a gives p1/q1 = 1/a
        convs = convergents([GaussianInt(3, -1)])
        assert convs[0].p == GaussianInt(1, 0)
        assert convs[0].q == GaussianInt(3, -1)

    def test_recurrence(self):
        a1, a2 = GaussianInt(2, 1), GaussianInt(-3, 0)
        convs = convergents([a1, a2])
        assert convs[1].p == a2 * convs[0].p + GaussianInt(0, 0)
        assert convs[1].q == a2 * convs[0].q + GaussianInt(1, 0)

    @given(interior_points)
    def test_unit_determinant(self, z):
        digits = [s.digit for s in expand(z, 8)]
        convs = convergents(digits)
        prev_p, prev_q = GaussianInt(0, 0), GaussianInt(1, 0)
        for c in convs:
            det = c.p * prev_q - prev_p * c.q
            assert det.norm() == 1
            prev_p, prev_q = c.p, c.q

    def test_fault_injection_breaks_determinant(self):
        digits = [s.digit for s in expand(DEFAULT_SEED, 4)]
        convs = convergents(digits, _q_sign=-1)
        dets = []
        prev_p, prev_q = GaussianInt(0, 0), GaussianInt(1, 0)
        for c in convs:
            dets.append((c.p * prev_q - prev_p * c.q).norm())
            prev_p, prev_q = c.p, c.q
        assert any(d != 1 for d in dets)


class TestApproximation:
    def test_report_on_default_seed(self):
        steps = expand(DEFAULT_SEED, 12)
        convs = convergents([s.digit for s in steps])
        report = check_approximation(DEFAULT_SEED, steps, convs)
        assert report.passed
        assert len(report.steps) == 12
        # errors shrink roughly like |q_n|^-2
        errs = [c.error for c in report.steps]
        assert errs[-1] < errs[0] * 1e-6

    def test_length_mismatch(self):
        steps = expand(DEFAULT_SEED, 5)
        convs = convergents([s.digit for s in steps])[:-1]
        with pytest.raises(LengthMismatch):
            check_approximation(DEFAULT_SEED, steps, convs)

    @given(interior_points)
    def test_float_report_passes(self, z):
        steps = expand(z, 8)
        if not steps:
            return
        convs = convergents([s.digit for s in steps])
        assert check_approximation(z, steps, convs).passed


class TestExactOracle:
    """Dyadic-rational seeds checked in exact Fraction arithmetic."""

    def test_matches_float_expansion(self):
        # dyadic seed, so the float orbit starts from exactly the same
        # number; termination is ~30 digits away, far beyond the probe
        z = QI(Fraction(356731, 1 << 20), Fraction(-411207, 1 << 20))
        exact = exact_expansion(z, 10)
        approx = expand(complex(z.re) + 1j * complex(z.im), 10)
        assert len(exact) == len(approx) == 10
        for e, a in zip(exact, approx):
            assert e.digit == a.digit
            # float error compounds with each digit, hence the loose cap
            assert complex(e.remainder.re, e.remainder.im) == pytest.approx(
                a.remainder, abs=1e-4
            )

    def test_guarantees_on_sample(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            num = rng.integers(-(2**20), 2**20, size=2)
            z = QI(Fraction(int(num[0]), 2**21), Fraction(int(num[1]), 2**21))
            steps = exact_expansion(z, 12)
            assert determinant_is_unit(steps)
            assert error_bound_holds(z, steps)
            assert growth_holds(steps)

    def test_terminating_rational(self):
        z = QI(Fraction(1, 4), Fraction(0))
        steps = exact_expansion(z, 10)
        assert len(steps) == 1
        assert steps[0].remainder.is_zero()
        assert error_bound_holds(z, steps)


class TestNaturalExtension:
    def test_fixes_zero(self):
        s = NatExtState(0j, 0.3 + 0.1j)
        assert natext_step(s) == s

    def test_w_update(self):
        s = NatExtState(0.4 - 0.2j, 0.25j)
        nxt = natext_step(s)
        a = 2 + 1j
        assert nxt.z == pytest.approx(1.0 / s.z - a)
        assert nxt.w == pytest.approx(1.0 / (a + s.w))

    @given(interior_points)
    def test_invariance_residual_tiny(self, z):
        w = 0.3 + 0.2j
        assert invariance_residual(z, w) < 1e-12


class TestOrbitChunks:
    def test_chunking_is_invisible(self):
        big = np.concatenate(
            [zs for zs, _ in orbit_chunks(DEFAULT_SEED, 0j, 3000, chunk=3000)]
        )
        small = np.concatenate(
            [zs for zs, _ in orbit_chunks(DEFAULT_SEED, 0j, 3000, chunk=700)]
        )
        assert np.array_equal(big, small)

    def test_states_stay_in_domain(self):
        for zs, ws in orbit_chunks(DEFAULT_SEED, 0j, 20000):
            assert np.all(np.abs(zs.real) <= 0.5)
            assert np.all(np.abs(zs.imag) <= 0.5)
            # w history stays inside the raster box [-1,1]^2
            assert np.all(np.abs(ws.real) <= 1.0)
            assert np.all(np.abs(ws.imag) <= 1.0)

    def test_rational_seed_terminates(self):
        with pytest.raises(OrbitTerminated):
            for _ in orbit_chunks(0.25 + 0j, 0j, 100):
                pass

    def test_outside_domain_rejected(self):
        with pytest.raises(DomainError):
            next(orbit_chunks(0.7 + 0j, 0j, 10))
