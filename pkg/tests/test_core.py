import math

import numpy as np
import pytest

from contactflow.core import (
    ContactState,
    DampingKind,
    HerglotzLagrangian,
    OscillatorSystem,
    SinusoidalForcing,
    contact_hamiltonian,
    contact_vector_field,
    continuous_gel_residual,
    energy,
    eval_lagrangian,
    exact_damped_solution,
    exact_forced_solution,
)
from contactflow.errors import InconsistentAction, ResonanceError


def linear_sys(alpha=0.1):
    return OscillatorSystem(alpha=alpha)


def quad_sys(alpha=0.1):
    return OscillatorSystem(alpha=alpha, damping=DampingKind.QUADRATIC_Z)


def rk4_reference(rhs, y0, t_end, h):
    """Independent fixed-step RK4 used as an oracle throughout."""
    y = np.array(y0, dtype=float)
    n = int(round(t_end / h))
    t = 0.0
    for _ in range(n):
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, y + h / 2 * k1)
        k3 = rhs(t + h / 2, y + h / 2 * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return y


class TestLagrangianAndHamiltonian:
    def test_lagrangian_vanishes_at_origin(self):
        assert eval_lagrangian(linear_sys(), 0.0, [0.0], [0.0], 0.0) == 0.0

    def test_lagrangian_potential_term(self):
        assert eval_lagrangian(linear_sys(), 0.0, [1.0], [0.0], 0.0) == pytest.approx(-0.5)

    def test_lagrangian_quadratic_damping(self):
        assert eval_lagrangian(quad_sys(), 0.0, [0.0], [0.0], 2.0) == pytest.approx(-0.2)

    def test_hamiltonian_origin(self):
        st = ContactState(t=0.0, x=[0.0], p=[0.0], z=0.0)
        assert contact_hamiltonian(linear_sys(0.7), st) == 0.0

    def test_hamiltonian_potential(self):
        st = ContactState(t=0.0, x=[1.0], p=[0.0], z=0.0)
        assert contact_hamiltonian(linear_sys(), st) == pytest.approx(0.5)

    def test_hamiltonian_damping_term(self):
        st = ContactState(t=0.0, x=[0.0], p=[0.0], z=3.0)
        assert contact_hamiltonian(linear_sys(), st) == pytest.approx(0.3)

    def test_hamiltonian_legendre_relation(self):
        # H = p v - L with v = p, at many random points.
        rng = np.random.default_rng(3)
        for sys in (linear_sys(0.3), quad_sys(0.2)):
            for _ in range(20):
                x, p, z = rng.uniform(-2, 2, size=3)
                st = ContactState(t=0.0, x=[x], p=[p], z=z)
                lval = eval_lagrangian(sys, 0.0, [x], [p], z)
                assert contact_hamiltonian(sys, st) == pytest.approx(p * p - lval)

    def test_forcing_sign_convention(self):
        sys = OscillatorSystem(alpha=0.1, forcing=SinusoidalForcing(1.0, 1.0))
        t = math.pi / 2
        assert eval_lagrangian(sys, t, [2.0], [0.0], 0.0) == pytest.approx(-2.0 + 2.0)
        st = ContactState(t=t, x=[2.0], p=[0.0], z=0.0)
        assert contact_hamiltonian(sys, st) == pytest.approx(2.0 - 2.0)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            eval_lagrangian(linear_sys(), 0.0, [np.nan], [0.0], 0.0)


class TestVectorField:
    def test_damped_point(self):
        st = ContactState(t=0.0, x=[1.0], p=[0.0], z=0.0)
        xd, pd, zd = contact_vector_field(linear_sys(), st)
        assert xd == pytest.approx([0.0])
        assert pd == pytest.approx([-1.0])
        assert zd == pytest.approx(-0.5)

    def test_fixed_point(self):
        st = ContactState(t=0.0, x=[0.0], p=[0.0], z=0.0)
        xd, pd, zd = contact_vector_field(linear_sys(), st)
        assert np.all(xd == 0) and np.all(pd == 0) and zd == 0.0

    def test_quadratic_damping_point(self):
        st = ContactState(t=0.0, x=[0.0], p=[1.0], z=0.0)
        xd, pd, zd = contact_vector_field(quad_sys(), st)
        assert xd == pytest.approx([1.0])
        assert pd == pytest.approx([0.0])
        assert zd == pytest.approx(0.5)

    def test_zdot_equals_lagrangian(self):
        rng = np.random.default_rng(11)
        for sys in (linear_sys(0.4), quad_sys(0.3)):
            for _ in range(10):
                x, p, z = rng.uniform(-2, 2, size=3)
                st = ContactState(t=0.0, x=[x], p=[p], z=z)
                _, _, zd = contact_vector_field(sys, st)
                assert zd == pytest.approx(eval_lagrangian(sys, 0.0, [x], [p], z))


class TestGelResidual:
    def test_undamped_solution(self):
        lag = HerglotzLagrangian.from_system(linear_sys(0.0))
        # x = cos t at t = 0: x=1, v=0, a=-1; dL/dz = 0 so z is free.
        zdot = lag.eval(0.0, [1.0], [0.0], 5.0)
        r = continuous_gel_residual(lag, 0.0, [1.0], [0.0], [-1.0], 5.0, zdot)
        assert abs(r[0]) < 1e-9

    def test_damped_equation_of_motion(self):
        sys = linear_sys(0.1)
        lag = HerglotzLagrangian.from_system(sys)
        rng = np.random.default_rng(5)
        for _ in range(10):
            x, v, z = rng.uniform(-1, 1, size=3)
            a = -x - 0.1 * v
            zdot = lag.eval(0.0, [x], [v], z)
            r = continuous_gel_residual(lag, 0.0, [x], [v], [a], z, zdot)
            assert abs(r[0]) < 1e-9

    def test_damping_omitted_gives_minus_alpha_v(self):
        lag = HerglotzLagrangian.from_system(linear_sys(0.1))
        zdot = lag.eval(0.0, [0.0], [1.0], 0.0)
        r = continuous_gel_residual(lag, 0.0, [0.0], [1.0], [0.0], 0.0, zdot)
        assert r[0] == pytest.approx(-0.1, abs=1e-10)

    def test_rejects_inconsistent_zdot(self):
        lag = HerglotzLagrangian.from_system(linear_sys(0.1))
        with pytest.raises(InconsistentAction):
            continuous_gel_residual(lag, 0.0, [1.0], [0.0], [-1.0], 0.0, 123.0)


class TestEnergy:
    def test_potential_only(self):
        lag = HerglotzLagrangian.from_system(linear_sys(0.1))
        assert energy(lag, 0.0, [1.0], [0.0], 0.0) == pytest.approx(0.5)

    def test_origin(self):
        lag = HerglotzLagrangian.from_system(linear_sys(0.1))
        assert energy(lag, 0.0, [0.0], [0.0], 0.0) == 0.0

    def test_kinetic_and_damping(self):
        lag = HerglotzLagrangian.from_system(linear_sys(0.1))
        assert energy(lag, 0.0, [0.0], [1.0], 1.0) == pytest.approx(0.6)


class TestExactDamped:
    def test_pure_cosine(self):
        x, v = exact_damped_solution(0.0, 1.0, 0.0, math.pi / 2)
        assert x == pytest.approx(0.0, abs=1e-14)
        assert v == pytest.approx(-1.0)

    def test_critical_value(self):
        x, _ = exact_damped_solution(2.0, 1.0, 0.0, 1.0)
        assert x == pytest.approx(2.0 * math.exp(-1.0), rel=1e-12)

    @pytest.mark.parametrize("alpha", [0.1, 1.9, 2.0, 2.1, 5.0])
    def test_against_rk4_oracle(self, alpha):
        def rhs(t, y):
            return np.array([y[1], -y[0] - alpha * y[1]])

        ref = rk4_reference(rhs, [1.0, 0.5], 2.0, 1e-4)
        x, v = exact_damped_solution(alpha, 1.0, 0.5, 2.0)
        assert x == pytest.approx(ref[0], abs=1e-8)
        assert v == pytest.approx(ref[1], abs=1e-8)

    def test_continuity_at_regime_boundary(self):
        for t in (0.5, 1.0, 3.0):
            below = exact_damped_solution(2.0 - 1e-9, 1.0, 0.3, t)
            above = exact_damped_solution(2.0 + 1e-9, 1.0, 0.3, t)
            crit = exact_damped_solution(2.0, 1.0, 0.3, t)
            assert below[0] == pytest.approx(crit[0], abs=1e-9)
            assert above[0] == pytest.approx(crit[0], abs=1e-9)

    def test_initial_conditions_exact(self):
        for alpha in (0.0, 0.1, 2.0, 5.0):
            x, v = exact_damped_solution(alpha, 1.25, -0.75, 0.0)
            assert abs(x - 1.25) < 1e-14
            assert abs(v + 0.75) < 1e-14


class TestExactForced:
    def test_beta_zero_matches_damped(self):
        for t in (0.0, 0.7, 3.0):
            a = exact_forced_solution(0.3, 0.0, 0.8, 1.0, 0.2, t)
            b = exact_damped_solution(0.3, 1.0, 0.2, t)
            assert a == pytest.approx(b)

    def test_resonant_particular_solution(self):
        # omega = 1, alpha = 0.5, beta = 1: x_p(t) = -2 cos t.
        alpha, beta, omega = 0.5, 1.0, 1.0
        # Start exactly on the particular solution: x_p(0) = -2, v_p(0) = 0.
        for t in (0.4, 1.3, 7.0):
            x, _ = exact_forced_solution(alpha, beta, omega, -2.0, 0.0, t)
            # Homogeneous part decays; compare against -2 cos t + hom.
            xh, _ = exact_damped_solution(alpha, 0.0, 0.0, t)
            assert x == pytest.approx(-2.0 * math.cos(t) + xh, rel=1e-12)

    @pytest.mark.parametrize("params", [(0.3, 0.5, 0.8), (1.5, 1.0, 2.0), (0.0, 0.7, 0.5)])
    def test_against_rk4_oracle(self, params):
        alpha, beta, omega = params

        def rhs(t, y):
            return np.array(
                [y[1], -y[0] - alpha * y[1] + beta * math.sin(omega * t)]
            )

        ref = rk4_reference(rhs, [1.0, 0.0], 2.0, 1e-4)
        x, v = exact_forced_solution(alpha, beta, omega, 1.0, 0.0, 2.0)
        assert x == pytest.approx(ref[0], abs=1e-8)
        assert v == pytest.approx(ref[1], abs=1e-8)

    def test_rejects_resonance(self):
        with pytest.raises(ResonanceError):
            exact_forced_solution(0.0, 1.0, 1.0, 1.0, 0.0, 1.0)

    def test_initial_conditions_exact(self):
        x, v = exact_forced_solution(0.3, 0.5, 0.8, 1.1, -0.2, 0.0)
        assert abs(x - 1.1) < 1e-13
        assert abs(v + 0.2) < 1e-13


class TestContinuousDecayLaws:
    """H and E follow exp(-alpha t) along a high-accuracy reference flow."""

    def setup_method(self):
        self.sys = linear_sys(0.1)
        self.lag = HerglotzLagrangian.from_system(self.sys)

    def _reference_flow(self, t_end, h=1e-3):
        sys = self.sys

        def rhs(t, y):
            st = ContactState(t=t, x=y[:1], p=y[1:2], z=float(y[2]))
            xd, pd, zd = contact_vector_field(sys, st)
            return np.concatenate([xd, pd, [zd]])

        return rk4_reference(rhs, [1.0, 0.0, 0.0], t_end, h)

    def test_hamiltonian_decay(self):
        H0 = contact_hamiltonian(self.sys, ContactState(t=0, x=[1.0], p=[0.0], z=0.0))
        for t in (1.0, 5.0, 10.0):
            y = self._reference_flow(t)
            H = contact_hamiltonian(
                self.sys, ContactState(t=t, x=y[:1], p=y[1:2], z=float(y[2]))
            )
            assert abs(H - H0 * math.exp(-0.1 * t)) < 1e-6

    def test_energy_decay(self):
        E0 = energy(self.lag, 0.0, [1.0], [0.0], 0.0)
        for t in (1.0, 5.0, 10.0):
            y = self._reference_flow(t)
            E = energy(self.lag, t, y[:1], y[1:2], float(y[2]))
            assert abs(E - E0 * math.exp(-0.1 * t)) < 1e-6

    @pytest.mark.parametrize("alpha", [0.0, 0.1, 2.0, 5.0])
    def test_gel_residual_along_exact_solution(self, alpha):
        sys = OscillatorSystem(alpha=alpha)
        lag = HerglotzLagrangian.from_system(sys)
        for t in (0.0, 0.5, 1.5, 4.0):
            x, v = exact_damped_solution(alpha, 1.0, 0.0, t)
            a = -x - alpha * v
            z = 0.37  # z does not enter the linear-damping residual
            zdot = lag.eval(t, [x], [v], z)
            r = continuous_gel_residual(lag, t, [x], [v], [a], z, zdot)
            assert abs(r[0]) < 1e-8


class TestSystemValidation:
    def test_quadratic_damping_rejects_forcing(self):
        with pytest.raises(ValueError):
            OscillatorSystem(
                alpha=0.1,
                damping=DampingKind.QUADRATIC_Z,
                forcing=SinusoidalForcing(1.0, 1.0),
            )

    def test_user_potential_gradient_checked(self):
        with pytest.raises(ValueError):
            OscillatorSystem(
                alpha=0.1,
                potential=lambda x: float(x @ x),
                potential_grad=lambda x: 3.0 * x,  # wrong gradient
            )

    def test_user_potential_accepted(self):
        sys = OscillatorSystem(
            alpha=0.1,
            potential=lambda x: 0.25 * float(x @ x) ** 2,
            potential_grad=lambda x: float(x @ x) * x,
        )
        assert sys.V([1.0]) == pytest.approx(0.25)
        assert sys.Vp([1.0]) == pytest.approx([1.0])

    def test_negative_alpha_rejected(self):
        with pytest.raises(ValueError):
            OscillatorSystem(alpha=-0.1)
