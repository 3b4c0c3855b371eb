"""Closed-form contact steppers, reference methods and the trajectory driver.

All steppers are pure functions (system, state, h) -> state.  The driver
`integrate` runs them on a uniform grid and records positions, momenta and
the action variable.  For the built-in scalar harmonic systems a compiled
loop is used when available (see _kernels); the per-step arithmetic is
identical in both backends.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    ContactState,
    DampingKind,
    OscillatorSystem,
    SinusoidalForcing,
    Trajectory,
    contact_hamiltonian,
    energy,
    eval_lagrangian,
    exact_damped_solution,
    exact_forced_solution,
    HerglotzLagrangian,
    _as_vec,
)
from .errors import NoConvergence, SingularUpdate, StepTooLarge

__all__ = [
    "StepperId",
    "LeapfrogState",
    "TwoPointState",
    "contact1_step",
    "contact2_step",
    "contact_quad_z_step",
    "contact2_forced_step",
    "leapfrog_step",
    "ruth3_step",
    "rk4_step",
    "vnc_step",
    "pi_from_p",
    "integrate",
    "trajectory_diagnostics",
]

# Third-order Ruth coefficients, kick-drift form.  Correctness is enforced
# behaviorally by the order-3 convergence test on the undamped oscillator.
RUTH3_KICKS = (7.0 / 24.0, 0.75, -1.0 / 24.0)
RUTH3_DRIFTS = (2.0 / 3.0, -2.0 / 3.0, 1.0)

_Z_NEWTON_MAXIT = 50
_SINGULAR_TOL = 1e-12


class StepperId(enum.Enum):
    CONTACT1 = "contact1"
    CONTACT2 = "contact2"
    CONTACT_QUAD_Z = "contact_quad_z"
    CONTACT2_FORCED = "contact2_forced"
    LEAPFROG = "leapfrog"
    RUTH3 = "ruth3"
    RK4 = "rk4"
    VNC = "vnc"


CONTACT_STEPPERS = (
    StepperId.CONTACT1,
    StepperId.CONTACT2,
    StepperId.CONTACT_QUAD_Z,
    StepperId.CONTACT2_FORCED,
)


@dataclass(frozen=True)
class LeapfrogState:
    """Leapfrog state at an integer step: position plus the momentum pi of
    the three-stage (kick-drift-kick) formulation."""

    t: float
    x: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _as_vec(self.x))
        object.__setattr__(self, "pi", _as_vec(self.pi))


@dataclass(frozen=True)
class TwoPointState:
    """Two consecutive positions held by the VNC two-step recursion;
    t is the time of x_cur."""

    t: float
    x_prev: np.ndarray
    x_cur: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x_prev", _as_vec(self.x_prev))
        object.__setattr__(self, "x_cur", _as_vec(self.x_cur))


def contact1_step(sys: OscillatorSystem, state: ContactState, h: float) -> ContactState:
    """First-order contact stepper for linear damping (explicit)."""
    a = sys.alpha
    x, p, z = state.x, state.p, state.z
    vpx = sys.Vp(x)
    x1 = x + h * (1.0 - h * a) * p - 0.5 * h * h * vpx
    p1 = (1.0 - h * a) * p - 0.5 * h * (sys.Vp(x1) + vpx)
    d = (x1 - x) / h
    lval = 0.5 * float(d @ d) - 0.5 * (sys.V(x) + sys.V(x1)) - a * z
    z1 = z + h * lval
    return ContactState(t=state.t + h, x=x1, p=p1, z=z1)


def contact2_step(sys: OscillatorSystem, state: ContactState, h: float) -> ContactState:
    """Second-order contact stepper for linear damping (explicit)."""
    a = sys.alpha
    b = 0.5 * h * a
    if 1.0 + b <= 0.0:
        raise StepTooLarge(f"1 + h alpha / 2 = {1.0 + b} <= 0")
    x, p, z = state.x, state.p, state.z
    vpx = sys.Vp(x)
    x1 = x + h * (1.0 - b) * p - 0.5 * h * h * vpx
    p1 = ((1.0 - b) * p - 0.5 * h * (sys.Vp(x1) + vpx)) / (1.0 + b)
    d = (x1 - x) / h
    kin = 0.5 * float(d @ d) - 0.5 * (sys.V(x) + sys.V(x1))
    z1 = (z * (1.0 - b) + h * kin) / (1.0 + b)
    return ContactState(t=state.t + h, x=x1, p=p1, z=z1)


def contact_quad_z_step(
    sys: OscillatorSystem, state: ContactState, h: float
) -> ContactState:
    """Implicit contact stepper for the quadratic-in-z damping term."""
    a = sys.alpha
    x, p, z = state.x, state.p, state.z
    vpx = sys.Vp(x)
    c0 = 1.0 - 0.5 * h * a * z
    x1 = x + h * c0 * p - 0.5 * h * h * vpx
    d = (x1 - x) / h
    kin = 0.5 * float(d @ d) - 0.5 * (sys.V(x) + sys.V(x1))
    # Newton on z1 = z + h (kin - (a/4)(z^2 + z1^2)), from the explicit predictor.
    z1 = z + h * (kin - 0.5 * a * z * z)
    converged = False
    for _ in range(_Z_NEWTON_MAXIT):
        g = z1 - z - h * (kin - 0.25 * a * (z * z + z1 * z1))
        if abs(g) <= 1e-12 * (1.0 + abs(z1)):
            converged = True
            break
        gp = 1.0 + 0.5 * h * a * z1
        if abs(gp) < _SINGULAR_TOL:
            raise SingularUpdate(f"|1 + (h/2) alpha z1| = {abs(gp)}")
        z1 -= g / gp
    if not converged:
        raise NoConvergence(f"z-update did not converge in {_Z_NEWTON_MAXIT} iterations")
    c1 = 1.0 + 0.5 * h * a * z1
    if abs(c1) < _SINGULAR_TOL:
        raise SingularUpdate(f"|1 + (h/2) alpha z1| = {abs(c1)}")
    p1 = (c0 * p - 0.5 * h * (vpx + sys.Vp(x1))) / c1
    return ContactState(t=state.t + h, x=x1, p=p1, z=z1)


def contact2_forced_step(
    sys: OscillatorSystem, state: ContactState, h: float
) -> ContactState:
    """Second-order contact stepper with external forcing (scalar x)."""
    a = sys.alpha
    b = 0.5 * h * a
    x, p, z, t = state.x, state.p, state.z, state.t
    ft, fth = sys.f(t), sys.f(t + h)
    vpx = sys.Vp(x)
    x1 = x + h * (1.0 - b) * p - 0.5 * h * h * vpx
    x1[0] += 0.5 * h * h * ft
    p1 = ((1.0 - b) * p - 0.5 * h * (sys.Vp(x1) + vpx)) / (1.0 + b)
    p1[0] += 0.5 * h * (fth + ft) / (1.0 + b)
    d = (x1 - x) / h
    kin = (
        0.5 * float(d @ d)
        - 0.5 * (sys.V(x) + sys.V(x1))
        + 0.5 * (ft * float(x[0]) + fth * float(x1[0]))
    )
    z1 = (z * (1.0 - b) + h * kin) / (1.0 + b)
    return ContactState(t=t + h, x=x1, p=p1, z=z1)


def leapfrog_step(sys: OscillatorSystem, state: LeapfrogState, h: float) -> LeapfrogState:
    """Stormer-Verlet with Rayleigh damping, three-stage form; forcing is
    added when evaluating the acceleration."""
    a = sys.alpha
    x, pi, t = state.x, state.pi, state.t
    num = pi - 0.5 * h * sys.Vp(x)
    if sys.forcing is not None:
        num = num.copy()
        num[0] += 0.5 * h * sys.f(t)
    ph = num / (1.0 + 0.5 * h * a)
    x1 = x + h * ph
    pi1 = ph - 0.5 * h * (sys.Vp(x1) + a * ph)
    if sys.forcing is not None:
        pi1[0] += 0.5 * h * sys.f(t + h)
    return LeapfrogState(t=t + h, x=x1, pi=pi1)


def _acceleration(sys: OscillatorSystem, t: float, x, p, z: float):
    acc = -sys.Vp(x) - p * sys.damping_dz(z)
    if sys.forcing is not None:
        acc = acc.copy()
        acc[0] += sys.f(t)
    return acc


def ruth3_step(sys: OscillatorSystem, state: ContactState, h: float) -> ContactState:
    """Third-order Ruth kick-drift composition; each kick uses the freshest
    momentum in the damping term (the scheme is symplectic only for
    separable Hamiltonians)."""
    x, p, z, t = state.x.copy(), state.p.copy(), state.z, state.t
    t_sub = t
    for kick, drift in zip(RUTH3_KICKS, RUTH3_DRIFTS):
        p = p + h * kick * _acceleration(sys, t_sub, x, p, z)
        x = x + h * drift * p
        t_sub += h * drift
    return ContactState(t=t + h, x=x, p=p, z=z)


def rk4_step(sys: OscillatorSystem, state: ContactState, h: float) -> ContactState:
    """Classical four-stage Runge-Kutta on (xdot, pdot, zdot) = (p, a, L)."""

    def field(t, x, p, z):
        return (
            p,
            _acceleration(sys, t, x, p, z),
            eval_lagrangian(sys, t, x, p, z),
        )

    x, p, z, t = state.x, state.p, state.z, state.t
    k1x, k1p, k1z = field(t, x, p, z)
    k2x, k2p, k2z = field(t + 0.5 * h, x + 0.5 * h * k1x, p + 0.5 * h * k1p, z + 0.5 * h * k1z)
    k3x, k3p, k3z = field(t + 0.5 * h, x + 0.5 * h * k2x, p + 0.5 * h * k2p, z + 0.5 * h * k2z)
    k4x, k4p, k4z = field(t + h, x + h * k3x, p + h * k3p, z + h * k3z)
    x1 = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    p1 = p + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
    z1 = z + (h / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
    return ContactState(t=t + h, x=x1, p=p1, z=z1)


def vnc_step(sys: OscillatorSystem, state: TwoPointState, h: float) -> TwoPointState:
    """Variational non-contact two-step recursion."""
    a = sys.alpha
    x0, x1, t1 = state.x_prev, state.x_cur, state.t
    num = (2.0 * x1 - x0) / (h * h) + a * x0 / (2.0 * h) - sys.Vp(x1)
    if sys.forcing is not None:
        num = num.copy()
        num[0] += sys.f(t1)
    x2 = num / (1.0 / (h * h) + a / (2.0 * h))
    return TwoPointState(t=t1 + h, x_prev=x1, x_cur=x2)


def pi_from_p(sys: OscillatorSystem, x, p, h: float) -> np.ndarray:
    """Leapfrog integer-step momentum matching a contact-method momentum:
    pi = (1 - h^2 a^2 / 4) p - (h^2 / 4) a V'(x).  Seeding pi this way makes
    the leapfrog position history coincide with the second-order contact
    stepper started from p."""
    a = sys.alpha
    return (1.0 - 0.25 * h * h * a * a) * _as_vec(p) - 0.25 * h * h * a * sys.Vp(x)


_STEP_FNS = {
    StepperId.CONTACT1: contact1_step,
    StepperId.CONTACT2: contact2_step,
    StepperId.CONTACT_QUAD_Z: contact_quad_z_step,
    StepperId.CONTACT2_FORCED: contact2_forced_step,
    StepperId.RUTH3: ruth3_step,
    StepperId.RK4: rk4_step,
}


def _accumulate_z(sys, t0, h, xs, ps, z0):
    """Trapezoidal quadrature of the Lagrangian along a computed (x, p)
    path; diagnostics only (reference methods carry no intrinsic z)."""
    n = xs.shape[0]
    zs = np.empty(n)
    zs[0] = z0
    for j in range(n - 1):
        l0 = eval_lagrangian(sys, t0 + j * h, xs[j], ps[j], zs[j])
        z_star = zs[j] + h * l0
        l1 = eval_lagrangian(sys, t0 + (j + 1) * h, xs[j + 1], ps[j + 1], z_star)
        zs[j + 1] = zs[j] + 0.5 * h * (l0 + l1)
    return zs


def _python_loop(stepper, sys, initial, h, n_steps):
    n = initial.dim
    xs = np.empty((n_steps + 1, n))
    ps = np.empty((n_steps + 1, n))
    zs = np.empty(n_steps + 1)
    state = initial
    xs[0], ps[0], zs[0] = state.x, state.p, state.z
    step_fn = _STEP_FNS[stepper]
    for j in range(n_steps):
        try:
            state = step_fn(sys, state, h)
        except Exception as exc:
            exc.step_index = j
            raise
        xs[j + 1], ps[j + 1], zs[j + 1] = state.x, state.p, state.z
    return xs, ps, zs


def _leapfrog_loop(sys, initial, h, n_steps):
    n = initial.dim
    xs = np.empty((n_steps + 1, n))
    pis = np.empty((n_steps + 1, n))
    state = LeapfrogState(t=initial.t, x=initial.x, pi=initial.p)
    xs[0], pis[0] = state.x, state.pi
    for j in range(n_steps):
        state = leapfrog_step(sys, state, h)
        xs[j + 1], pis[j + 1] = state.x, state.pi
    return xs, pis


def _vnc_seed(sys, initial, h, bootstrap):
    """First position of the two-step VNC recursion."""
    x0, p0, t0 = initial.x, initial.p, initial.t
    if bootstrap == "exact":
        if not (sys.is_harmonic and x0.size == 1):
            raise ValueError("exact VNC bootstrap needs the scalar harmonic system")
        if sys.forcing is None:
            x1, _ = exact_damped_solution(sys.alpha, float(x0[0]), float(p0[0]), h)
        elif isinstance(sys.forcing, SinusoidalForcing):
            x1, _ = exact_forced_solution(
                sys.alpha,
                sys.forcing.beta,
                sys.forcing.omega,
                float(x0[0]),
                float(p0[0]),
                h,
            )
        else:
            raise ValueError("exact VNC bootstrap needs sinusoidal forcing")
        return np.array([x1])
    if bootstrap == "euler":
        return x0 + h * p0
    x1 = x0 + h * p0 - 0.5 * h * h * (sys.Vp(x0) + sys.alpha * p0)
    if sys.forcing is not None:
        x1 = x1.copy()
        x1[0] += 0.5 * h * h * sys.f(t0)
    return x1


def _vnc_loop(sys, initial, h, n_steps, bootstrap):
    n = initial.dim
    xs = np.empty((n_steps + 1, n))
    xs[0] = initial.x
    if n_steps >= 1:
        xs[1] = _vnc_seed(sys, initial, h, bootstrap)
    state = TwoPointState(t=initial.t + h, x_prev=xs[0], x_cur=xs[1]) if n_steps >= 1 else None
    for j in range(1, n_steps):
        state = vnc_step(sys, state, h)
        xs[j + 1] = state.x_cur
    # Momenta by central differences; second-order one-sided at the end.
    # Diagnostics only -- the recursion itself never uses them.
    ps = np.empty_like(xs)
    ps[0] = initial.p
    if n_steps >= 1:
        for j in range(1, n_steps):
            ps[j] = (xs[j + 1] - xs[j - 1]) / (2.0 * h)
        if n_steps >= 2:
            ps[n_steps] = (
                3.0 * xs[n_steps] - 4.0 * xs[n_steps - 1] + xs[n_steps - 2]
            ) / (2.0 * h)
        else:
            ps[1] = (xs[1] - xs[0]) / h
    return xs, ps


def _kernel_eligible(
    stepper: StepperId, sys: OscillatorSystem, initial: ContactState
) -> bool:
    if not sys.is_harmonic or initial.dim != 1:
        return False
    if stepper is StepperId.CONTACT_QUAD_Z:
        if sys.damping is not DampingKind.QUADRATIC_Z:
            return False
    elif sys.damping is not DampingKind.LINEAR_Z:
        return False
    return sys.forcing is None or isinstance(sys.forcing, SinusoidalForcing)


def integrate(
    stepper: StepperId,
    sys: OscillatorSystem,
    initial: ContactState,
    h: float,
    n_steps: int,
    backend: str = "auto",
    vnc_bootstrap: str = "taylor",
) -> Trajectory:
    """Run `stepper` for n_steps from `initial`.

    For the leapfrog method the momentum slot of `initial` is taken to be
    the integer-step momentum pi (use pi_from_p to match a contact start).
    backend is "auto", "python" or "compiled"; the compiled fast path covers
    the built-in scalar harmonic systems.
    """
    if h <= 0.0:
        raise ValueError(f"h must be positive, got {h}")
    if n_steps < 0:
        raise ValueError(f"n_steps must be >= 0, got {n_steps}")
    if vnc_bootstrap not in ("taylor", "exact", "euler"):
        raise ValueError(f"unknown vnc_bootstrap {vnc_bootstrap!r}")
    from . import _kernels

    use_kernel = False
    if backend not in ("auto", "python", "compiled"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend in ("auto", "compiled"):
        use_kernel = (
            _kernels.HAVE_SPEEDUPS
            and _kernel_eligible(stepper, sys, initial)
            and n_steps >= 1
            and vnc_bootstrap == "taylor"
        )
        if backend == "compiled" and not use_kernel:
            raise ValueError("compiled backend not available for this problem")

    if use_kernel:
        xs, ps, zs = _kernels.run(stepper, sys, initial, h, n_steps)
        if zs is None:
            zs = _accumulate_z(sys, initial.t, h, xs, ps, initial.z)
    elif stepper is StepperId.LEAPFROG:
        xs, ps = _leapfrog_loop(sys, initial, h, n_steps)
        zs = _accumulate_z(sys, initial.t, h, xs, ps, initial.z)
    elif stepper is StepperId.VNC:
        xs, ps = _vnc_loop(sys, initial, h, n_steps, vnc_bootstrap)
        zs = _accumulate_z(sys, initial.t, h, xs, ps, initial.z)
    elif stepper is StepperId.RUTH3:
        xs, ps, _ = _python_loop(stepper, sys, initial, h, n_steps)
        zs = _accumulate_z(sys, initial.t, h, xs, ps, initial.z)
    else:
        xs, ps, zs = _python_loop(stepper, sys, initial, h, n_steps)

    traj = Trajectory(
        t0=initial.t, h=h, method_id=stepper.value, xs=xs, ps=ps, zs=zs
    )
    traj.diagnostics.update(trajectory_diagnostics(traj, sys))
    return traj


def _conformal_factors(sys: OscillatorSystem, traj: Trajectory) -> np.ndarray | None:
    """Per-step predicted conformal factors for the contact steppers."""
    a, h = sys.alpha, traj.h
    n = traj.n_steps
    sid = traj.method_id
    if sid == StepperId.CONTACT1.value:
        return np.full(n, 1.0 - h * a)
    if sid in (StepperId.CONTACT2.value, StepperId.CONTACT2_FORCED.value):
        return np.full(n, (1.0 - 0.5 * h * a) / (1.0 + 0.5 * h * a))
    if sid == StepperId.CONTACT_QUAD_Z.value:
        z = traj.zs
        return (1.0 - 0.5 * h * a * z[:-1]) / (1.0 + 0.5 * h * a * z[1:])
    return None


def trajectory_diagnostics(traj: Trajectory, sys: OscillatorSystem) -> dict:
    """Per-sample H and E plus the cumulative predicted conformal factor
    (contact steppers only)."""
    lag = HerglotzLagrangian.from_system(sys)
    times = traj.times
    H = np.array(
        [contact_hamiltonian(sys, traj.state(j)) for j in range(traj.n_steps + 1)]
    )
    E = np.array(
        [
            energy(lag, times[j], traj.xs[j], traj.ps[j], float(traj.zs[j]))
            for j in range(traj.n_steps + 1)
        ]
    )
    out = {"H": H, "E": E}
    factors = _conformal_factors(sys, traj)
    if factors is not None:
        out["conformal_cumulative"] = np.concatenate(
            ([1.0], np.cumprod(factors))
        )
    return out
