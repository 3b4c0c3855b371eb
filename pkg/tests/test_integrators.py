import math

import numpy as np
import pytest

from contactflow.core import (
    ContactState,
    DampingKind,
    OscillatorSystem,
    SinusoidalForcing,
    exact_damped_solution,
    exact_forced_solution,
)
from contactflow.bea import convergence_order_estimate
from contactflow.integrators import (
    LeapfrogState,
    StepperId,
    TwoPointState,
    contact1_step,
    contact2_step,
    contact2_forced_step,
    contact_quad_z_step,
    integrate,
    leapfrog_step,
    pi_from_p,
    rk4_step,
    ruth3_step,
    vnc_step,
)

SYS = OscillatorSystem(alpha=0.1)
START = ContactState(t=0.0, x=[1.0], p=[0.0], z=0.0)
H_LIST = [0.1, 0.05, 0.025, 0.0125]


class TestStepValues:
    def test_contact1_example(self):
        s = contact1_step(SYS, START, 0.1)
        assert s.t == pytest.approx(0.1)
        assert s.x[0] == pytest.approx(0.995, abs=1e-15)
        assert s.p[0] == pytest.approx(-0.09975, abs=1e-15)
        assert s.z == pytest.approx(-0.049625625, abs=1e-15)

    def test_contact2_example(self):
        s = contact2_step(SYS, START, 0.1)
        assert s.x[0] == pytest.approx(0.995, abs=1e-15)
        assert s.p[0] == pytest.approx(-0.09975 / 1.005, rel=1e-15)
        kin = 0.5 * 0.05**2 - 0.5 * (0.5 + 0.5 * 0.995**2)
        assert s.z == pytest.approx(0.1 * kin / 1.005, rel=1e-14)

    def test_quad_z_z_update_is_implicit_root(self):
        sys = OscillatorSystem(alpha=0.1, damping=DampingKind.QUADRATIC_Z)
        st = ContactState(t=0.0, x=[1.0], p=[0.0], z=0.5)
        s = contact_quad_z_step(sys, st, 0.1)
        d = (s.x[0] - 1.0) / 0.1
        kin = 0.5 * d * d - 0.5 * (0.5 + 0.5 * s.x[0] ** 2)
        resid = s.z - 0.5 - 0.1 * (kin - 0.025 * (0.25 + s.z * s.z))
        assert abs(resid) <= 1e-12 * (1.0 + abs(s.z))

    def test_forced_reduces_to_contact2_at_beta_zero(self):
        forced = OscillatorSystem(alpha=0.1, forcing=SinusoidalForcing(0.0, 0.8))
        a = contact2_forced_step(forced, START, 0.1)
        b = contact2_step(SYS, START, 0.1)
        assert a.x[0] == b.x[0] and a.p[0] == b.p[0] and a.z == b.z

    def test_vnc_recursion_formula(self):
        sys = OscillatorSystem(alpha=0.5)
        st = TwoPointState(t=0.1, x_prev=[1.0], x_cur=[0.99])
        out = vnc_step(sys, st, 0.1)
        h, a = 0.1, 0.5
        expected = ((2 * 0.99 - 1.0) / h**2 + a * 1.0 / (2 * h) - 0.99) / (
            1.0 / h**2 + a / (2 * h)
        )
        assert out.x_cur[0] == pytest.approx(expected, rel=1e-15)
        assert out.x_prev[0] == 0.99
        assert out.t == pytest.approx(0.2)

    def test_leapfrog_undamped_is_verlet(self):
        sys = OscillatorSystem(alpha=0.0)
        st = LeapfrogState(t=0.0, x=[1.0], pi=[0.0])
        s = leapfrog_step(sys, st, 0.1)
        # classical Verlet: x1 = x0 + h p - h^2/2 V'(x0)
        assert s.x[0] == pytest.approx(1.0 - 0.005, abs=1e-15)
        assert s.pi[0] == pytest.approx(-0.05 * (1.0 + s.x[0]), rel=1e-15)


class TestDegeneration:
    """At alpha = 0 the contact steppers coincide with leapfrog."""

    @pytest.mark.parametrize("stepper", [StepperId.CONTACT1, StepperId.CONTACT2])
    def test_positions_match_leapfrog(self, stepper):
        sys = OscillatorSystem(alpha=0.0)
        st = ContactState(t=0.0, x=[1.0], p=[0.3], z=0.0)
        tc = integrate(stepper, sys, st, 0.1, 1000)
        tl = integrate(StepperId.LEAPFROG, sys, st, 0.1, 1000)
        steps = np.arange(1001)
        gap = np.abs(tc.xs[:, 0] - tl.xs[:, 0])
        assert np.all(gap <= 1e-14 * np.maximum(steps, 1))

    def test_momenta_match_leapfrog(self):
        sys = OscillatorSystem(alpha=0.0)
        st = ContactState(t=0.0, x=[1.0], p=[0.3], z=0.0)
        tc = integrate(StepperId.CONTACT2, sys, st, 0.1, 1000)
        tl = integrate(StepperId.LEAPFROG, sys, st, 0.1, 1000)
        assert np.max(np.abs(tc.ps - tl.ps)) <= 1e-11


class TestConvergence:
    def _order(self, stepper, alpha, **kw):
        sys = OscillatorSystem(alpha=alpha)
        exact = lambda t: exact_damped_solution(alpha, 1.0, 0.0, t)
        return convergence_order_estimate(stepper, sys, exact, H_LIST, 1.0, **kw)

    def test_contact1_first_order(self):
        assert self._order(StepperId.CONTACT1, 0.5) == pytest.approx(1.0, abs=0.15)

    def test_contact2_second_order(self):
        assert self._order(StepperId.CONTACT2, 0.5) == pytest.approx(2.0, abs=0.1)

    def test_vnc_second_order(self):
        slope = self._order(StepperId.VNC, 0.5, vnc_bootstrap="exact")
        assert slope == pytest.approx(2.0, abs=0.1)

    def test_leapfrog_second_order(self):
        assert self._order(StepperId.LEAPFROG, 0.5) == pytest.approx(2.0, abs=0.15)

    def test_ruth3_third_order_undamped(self):
        assert self._order(StepperId.RUTH3, 0.0) == pytest.approx(3.0, abs=0.15)

    def test_rk4_fourth_order(self):
        assert self._order(StepperId.RK4, 0.5) == pytest.approx(4.0, abs=0.15)

    def test_forced_stepper_second_order(self):
        beta, omega, alpha = 0.5, 0.8, 0.5
        sys = OscillatorSystem(alpha=alpha, forcing=SinusoidalForcing(beta, omega))
        exact = lambda t: exact_forced_solution(alpha, beta, omega, 1.0, 0.0, t)
        slope = convergence_order_estimate(
            StepperId.CONTACT2_FORCED, sys, exact, H_LIST, 1.0
        )
        assert slope == pytest.approx(2.0, abs=0.1)


class TestAccuracy:
    def test_rk4_close_to_exact(self):
        sys = OscillatorSystem(alpha=0.5)
        tr = integrate(StepperId.RK4, sys, START, 0.01, 100)
        xe, pe = exact_damped_solution(0.5, 1.0, 0.0, 1.0)
        assert tr.xs[-1, 0] == pytest.approx(xe, abs=1e-9)
        assert tr.ps[-1, 0] == pytest.approx(pe, abs=1e-9)

    def test_rk4_z_matches_action_integral(self):
        # z carried by RK4 should agree with trapezoid quadrature to O(h^2).
        sys = OscillatorSystem(alpha=0.5)
        coarse = integrate(StepperId.RK4, sys, START, 0.02, 50)
        fine = integrate(StepperId.RK4, sys, START, 0.002, 500)
        assert coarse.zs[-1] == pytest.approx(fine.zs[-1], abs=1e-7)

    def test_contact2_decays_hamiltonian(self):
        sys = OscillatorSystem(alpha=0.5)
        tr = integrate(StepperId.CONTACT2, sys, START, 0.1, 200)
        H = tr.diagnostics["H"]
        decay = H / H[0] - np.exp(-0.5 * tr.times)
        assert np.max(np.abs(decay)) < 5e-3


class TestDriver:
    def test_zero_steps(self):
        tr = integrate(StepperId.CONTACT2, SYS, START, 0.1, 0)
        assert tr.n_steps == 0
        assert tr.xs.shape == (1, 1)
        assert tr.xs[0, 0] == 1.0 and tr.zs[0] == 0.0

    def test_bad_h(self):
        with pytest.raises(ValueError):
            integrate(StepperId.CONTACT2, SYS, START, 0.0, 10)
        with pytest.raises(ValueError):
            integrate(StepperId.CONTACT2, SYS, START, -0.1, 10)

    def test_bad_steps(self):
        with pytest.raises(ValueError):
            integrate(StepperId.CONTACT2, SYS, START, 0.1, -1)

    def test_bad_backend(self):
        with pytest.raises(ValueError):
            integrate(StepperId.CONTACT2, SYS, START, 0.1, 10, backend="fortran")

    def test_python_backend_explicit(self):
        tr = integrate(StepperId.CONTACT1, SYS, START, 0.1, 5, backend="python")
        s = contact1_step(SYS, START, 0.1)
        assert tr.xs[1, 0] == s.x[0]

    def test_times_grid(self):
        tr = integrate(StepperId.CONTACT1, SYS, START, 0.25, 4)
        assert np.allclose(tr.times, [0.0, 0.25, 0.5, 0.75, 1.0])


class TestDiagnostics:
    def test_contact1_cumulative_factor(self):
        tr = integrate(StepperId.CONTACT1, SYS, START, 0.1, 10)
        cum = tr.diagnostics["conformal_cumulative"]
        assert cum[0] == 1.0
        assert cum[-1] == pytest.approx(0.99**10, rel=1e-14)

    def test_contact2_cumulative_factor(self):
        tr = integrate(StepperId.CONTACT2, SYS, START, 0.1, 10)
        cum = tr.diagnostics["conformal_cumulative"]
        r = (1 - 0.005) / (1 + 0.005)
        assert cum[-1] == pytest.approx(r**10, rel=1e-14)

    def test_reference_methods_have_no_factor(self):
        tr = integrate(StepperId.RK4, SYS, START, 0.1, 10)
        assert "conformal_cumulative" not in tr.diagnostics
        assert "H" in tr.diagnostics and "E" in tr.diagnostics

    def test_quad_z_factor_uses_z(self):
        sys = OscillatorSystem(alpha=0.1, damping=DampingKind.QUADRATIC_Z)
        st = ContactState(t=0.0, x=[1.0], p=[0.0], z=0.4)
        tr = integrate(StepperId.CONTACT_QUAD_Z, sys, st, 0.1, 3)
        cum = tr.diagnostics["conformal_cumulative"]
        expected = 1.0
        for j in range(3):
            expected *= (1 - 0.005 * tr.zs[j]) / (1 + 0.005 * tr.zs[j + 1])
        assert cum[-1] == pytest.approx(expected, rel=1e-14)


class TestPiMomentum:
    def test_formula_value(self):
        pi = pi_from_p(SYS, [1.0], [0.2], 0.1)
        a, h = 0.1, 0.1
        assert pi[0] == pytest.approx(
            (1 - h * h * a * a / 4) * 0.2 - (h * h / 4) * a * 1.0, rel=1e-15
        )

    def test_gap_scales_with_h_squared(self):
        # pi - p = O(h^2 (alpha + alpha^2)) at fixed state.
        a = 0.5
        sys = OscillatorSystem(alpha=a)
        gaps = []
        for h in (0.1, 0.05):
            gaps.append(abs(pi_from_p(sys, [1.0], [0.2], h)[0] - 0.2))
        assert gaps[0] / gaps[1] == pytest.approx(4.0, rel=1e-12)

    def test_vanishes_at_alpha_zero(self):
        sys = OscillatorSystem(alpha=0.0)
        assert pi_from_p(sys, [1.0], [0.2], 0.1)[0] == 0.2


class TestRuth3Structure:
    def test_z_frozen_within_step(self):
        s = ruth3_step(SYS, ContactState(t=0.0, x=[1.0], p=[0.0], z=0.7), 0.1)
        assert s.z == 0.7

    def test_time_substages_consistent(self):
        # Total drift is 2/3 - 2/3 + 1 = 1 step.
        s = ruth3_step(SYS, START, 0.1)
        assert s.t == pytest.approx(0.1)

    def test_undamped_matches_unforced_composition(self):
        sys = OscillatorSystem(alpha=0.0)
        st = ContactState(t=0.0, x=[1.0], p=[0.3], z=0.0)
        s = ruth3_step(sys, st, 0.1)
        x, p = np.array([1.0]), np.array([0.3])
        for c, d in zip((7 / 24, 3 / 4, -1 / 24), (2 / 3, -2 / 3, 1.0)):
            p = p + 0.1 * c * (-x)
            x = x + 0.1 * d * p
        assert s.x[0] == pytest.approx(x[0], rel=1e-15)
        assert s.p[0] == pytest.approx(p[0], rel=1e-15)


class TestVncBootstrap:
    def test_exact_seed_matches_solution(self):
        sys = OscillatorSystem(alpha=0.5)
        tr = integrate(StepperId.VNC, sys, START, 0.1, 1, vnc_bootstrap="exact")
        xe, _ = exact_damped_solution(0.5, 1.0, 0.0, 0.1)
        assert tr.xs[1, 0] == pytest.approx(xe, rel=1e-14)

    def test_taylor_seed_second_order(self):
        sys = OscillatorSystem(alpha=0.5)
        errs = []
        for h in (0.1, 0.05):
            tr = integrate(StepperId.VNC, sys, START, h, 1, vnc_bootstrap="taylor")
            xe, _ = exact_damped_solution(0.5, 1.0, 0.0, h)
            errs.append(abs(tr.xs[1, 0] - xe))
        assert errs[0] / errs[1] > 6.0  # local error O(h^3)

    def test_bad_bootstrap_rejected(self):
        with pytest.raises(ValueError):
            integrate(StepperId.VNC, SYS, START, 0.1, 5, vnc_bootstrap="spline")
