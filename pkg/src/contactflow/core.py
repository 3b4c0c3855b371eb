"""Domain types, continuous-theory evaluators and exact benchmark solutions.

Conventions: configuration space is flat R^n (n = 1 for the benchmark
systems), unit mass and unit frequency, so the built-in potential is
V(x) = |x|^2 / 2.  The action variable z is always a scalar.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InconsistentAction, ResonanceError

__all__ = [
    "DampingKind",
    "SinusoidalForcing",
    "OscillatorSystem",
    "ContactState",
    "HerglotzLagrangian",
    "Trajectory",
    "eval_lagrangian",
    "contact_hamiltonian",
    "contact_vector_field",
    "continuous_gel_residual",
    "energy",
    "exact_damped_solution",
    "exact_forced_solution",
]

# Central-difference step used for gradient checks and for differentiating
# user-supplied evaluators.
_FD_SCALE = 1e-6

# Damping values closer to critical than this use the critical-damping
# branch of the closed-form solution (avoids cancellation in sqrt(1 - a^2/4)).
_CRITICAL_BAND = 1e-8


def _as_vec(value) -> np.ndarray:
    v = np.atleast_1d(np.asarray(value, dtype=float))
    if v.ndim != 1:
        raise ValueError(f"expected a scalar or 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("non-finite component in input vector")
    return v


class DampingKind(enum.Enum):
    LINEAR_Z = "linear"
    QUADRATIC_Z = "quadratic"


@dataclass(frozen=True)
class SinusoidalForcing:
    """External forcing f(t) = beta * sin(omega * t)."""

    beta: float
    omega: float

    def __call__(self, t: float) -> float:
        return self.beta * math.sin(self.omega * t)


@dataclass(frozen=True)
class OscillatorSystem:
    """A damped, optionally forced mechanical system on flat space.

    The default potential is harmonic.  A user-supplied potential must come
    with its exact gradient; the pair is validated by central differences at
    seeded random points.
    """

    alpha: float
    damping: DampingKind = DampingKind.LINEAR_Z
    potential: Optional[Callable[[np.ndarray], float]] = None
    potential_grad: Optional[Callable[[np.ndarray], np.ndarray]] = None
    forcing: Optional[Callable[[float], float]] = None
    _grad_check_seed: int = field(default=0, repr=False)

    def __post_init__(self):
        if not (self.alpha >= 0.0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be finite and >= 0, got {self.alpha}")
        if (self.potential is None) != (self.potential_grad is None):
            raise ValueError("potential and potential_grad must be supplied together")
        if self.damping is DampingKind.QUADRATIC_Z and self.forcing is not None:
            raise ValueError("forcing is only supported with linear damping")
        if self.potential is not None:
            self._check_gradient()

    def _check_gradient(self):
        rng = np.random.default_rng(self._grad_check_seed)
        for x in rng.uniform(-2.0, 2.0, size=(5, 1)):
            g = _as_vec(self.potential_grad(x))
            for k in range(x.size):
                e = np.zeros_like(x)
                e[k] = _FD_SCALE * max(1.0, abs(x[k]))
                fd = (self.potential(x + e) - self.potential(x - e)) / (2.0 * e[k])
                if abs(fd - g[k]) > 1e-6 * max(1.0, abs(g[k])):
                    raise ValueError(
                        "potential_grad disagrees with finite differences "
                        f"at x={x} (component {k}: {g[k]} vs {fd})"
                    )

    @property
    def is_harmonic(self) -> bool:
        return self.potential is None

    def V(self, x) -> float:
        x = _as_vec(x)
        if self.potential is None:
            return 0.5 * float(x @ x)
        return float(self.potential(x))

    def Vp(self, x) -> np.ndarray:
        x = _as_vec(x)
        if self.potential_grad is None:
            return x.copy()
        return _as_vec(self.potential_grad(x))

    def f(self, t: float) -> float:
        return 0.0 if self.forcing is None else float(self.forcing(t))

    def damping_term(self, z: float) -> float:
        """The z-dependent term of the Lagrangian/Hamiltonian."""
        if self.damping is DampingKind.LINEAR_Z:
            return self.alpha * z
        return 0.5 * self.alpha * z * z

    def damping_dz(self, z: float) -> float:
        if self.damping is DampingKind.LINEAR_Z:
            return self.alpha
        return self.alpha * z


@dataclass(frozen=True)
class ContactState:
    """A point (t, x, p, z) of extended contact phase space."""

    t: float
    x: np.ndarray
    p: np.ndarray
    z: float

    def __post_init__(self):
        object.__setattr__(self, "x", _as_vec(self.x))
        object.__setattr__(self, "p", _as_vec(self.p))
        if self.x.shape != self.p.shape:
            raise ValueError("x and p must have the same dimension")
        if not (math.isfinite(self.t) and math.isfinite(self.z)):
            raise ValueError("t and z must be finite")

    @property
    def dim(self) -> int:
        return self.x.size


@dataclass
class Trajectory:
    """Ordered samples of a discrete trajectory on a uniform time grid.

    Time stamps are always computed as t0 + j*h so they carry no drift from
    repeated addition.
    """

    t0: float
    h: float
    method_id: str
    xs: np.ndarray  # shape (N+1, n)
    ps: np.ndarray  # shape (N+1, n)
    zs: np.ndarray  # shape (N+1,)
    diagnostics: dict = field(default_factory=dict)

    @property
    def n_steps(self) -> int:
        return self.xs.shape[0] - 1

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self.xs.shape[0])

    def state(self, j: int) -> ContactState:
        return ContactState(
            t=self.t0 + j * self.h, x=self.xs[j], p=self.ps[j], z=float(self.zs[j])
        )

    def states(self):
        return [self.state(j) for j in range(self.xs.shape[0])]


def eval_lagrangian(sys: OscillatorSystem, t: float, x, v, z: float) -> float:
    """Herglotz Lagrangian |v|^2/2 - V(x) - damping(z) + f(t) x."""
    x, v = _as_vec(x), _as_vec(v)
    if x.shape != v.shape:
        raise ValueError("x and v must have the same dimension")
    value = 0.5 * float(v @ v) - sys.V(x) - sys.damping_term(z)
    if sys.forcing is not None:
        value += sys.f(t) * float(x[0])
    return value


def contact_hamiltonian(sys: OscillatorSystem, state: ContactState) -> float:
    """Legendre transform of the Lagrangian: |p|^2/2 + V(x) + damping(z) - f(t) x."""
    value = 0.5 * float(state.p @ state.p) + sys.V(state.x) + sys.damping_term(state.z)
    if sys.forcing is not None:
        value -= sys.f(state.t) * float(state.x[0])
    return value


def contact_vector_field(sys: OscillatorSystem, state: ContactState):
    """Right-hand side (dx/dt, dp/dt, dz/dt) of the contact flow.

    In Darboux coordinates: (dH/dp, -dH/dx - p dH/dz, p dH/dp - H).
    """
    H = contact_hamiltonian(sys, state)
    dH_dx = sys.Vp(state.x)
    if sys.forcing is not None:
        dH_dx = dH_dx - np.array([sys.f(state.t)])
    dH_dz = sys.damping_dz(state.z)
    xdot = state.p.copy()
    pdot = -dH_dx - state.p * dH_dz
    zdot = float(state.p @ state.p) - H
    return xdot, pdot, zdot


@dataclass(frozen=True)
class HerglotzLagrangian:
    """Evaluation bundle for a generic Herglotz Lagrangian L(t, x, v, z)."""

    eval: Callable[[float, np.ndarray, np.ndarray, float], float]
    d_x: Callable[[float, np.ndarray, np.ndarray, float], np.ndarray]
    d_v: Callable[[float, np.ndarray, np.ndarray, float], np.ndarray]
    d_z: Callable[[float, np.ndarray, np.ndarray, float], float]

    @classmethod
    def from_system(cls, sys: OscillatorSystem) -> "HerglotzLagrangian":
        def d_x(t, x, v, z):
            g = -sys.Vp(x)
            if sys.forcing is not None:
                g = g + np.array([sys.f(t)])
            return g

        return cls(
            eval=lambda t, x, v, z: eval_lagrangian(sys, t, x, v, z),
            d_x=d_x,
            d_v=lambda t, x, v, z: _as_vec(v).copy(),
            d_z=lambda t, x, v, z: -sys.damping_dz(z),
        )


def _fd(fun, value, scale=_FD_SCALE):
    """Central difference of a vector-valued fun of one scalar argument."""
    e = scale * max(1.0, abs(value))
    return (np.asarray(fun(value + e)) - np.asarray(fun(value - e))) / (2.0 * e)


def continuous_gel_residual(
    lag: HerglotzLagrangian, t: float, x, v, a, z: float, zdot: float
) -> np.ndarray:
    """Residual of the generalized Euler-Lagrange equations.

    dL/dx - d/dt(dL/dv) + (dL/dz)(dL/dv), with the total time derivative
    expanded by the chain rule using (v, a, zdot).  Second derivatives of the
    Lagrangian are taken by central differences of d_v.
    """
    x, v, a = _as_vec(x), _as_vec(v), _as_vec(a)
    lval = lag.eval(t, x, v, z)
    if abs(zdot - lval) > 1e-10 * (1.0 + abs(lval)):
        raise InconsistentAction(
            f"zdot={zdot} does not match the Lagrangian value {lval}"
        )
    ddt = _fd(lambda s: lag.d_v(s, x, v, z), t)
    for k in range(x.size):
        def shift_x(s, k=k):
            xs = x.copy()
            xs[k] = s
            return lag.d_v(t, xs, v, z)

        def shift_v(s, k=k):
            vs = v.copy()
            vs[k] = s
            return lag.d_v(t, x, vs, z)

        ddt = ddt + _fd(shift_x, x[k]) * v[k] + _fd(shift_v, v[k]) * a[k]
    ddt = ddt + _fd(lambda s: lag.d_v(t, x, v, s), z) * zdot
    return lag.d_x(t, x, v, z) - ddt + lag.d_z(t, x, v, z) * lag.d_v(t, x, v, z)


def energy(lag: HerglotzLagrangian, t: float, x, v, z: float) -> float:
    """E = (dL/dv) . v - L."""
    x, v = _as_vec(x), _as_vec(v)
    return float(lag.d_v(t, x, v, z) @ v) - lag.eval(t, x, v, z)


def exact_damped_solution(alpha: float, x0: float, v0: float, t: float):
    """Closed-form solution of xddot = -x - alpha xdot.

    Returns (x, v).  Handles the under-, critically and over-damped regimes;
    within 1e-8 of alpha = 2 the critical branch is used.
    """
    lam = -0.5 * alpha
    if abs(alpha - 2.0) < _CRITICAL_BAND:
        a_coef = x0
        b_coef = v0 - lam * x0
        e = math.exp(lam * t)
        x = (a_coef + b_coef * t) * e
        v = (b_coef + lam * (a_coef + b_coef * t)) * e
        return x, v
    if alpha < 2.0:
        om = math.sqrt(1.0 - 0.25 * alpha * alpha)
        c = x0
        s = (v0 - lam * x0) / om
        e = math.exp(lam * t)
        cos, sin = math.cos(om * t), math.sin(om * t)
        x = e * (c * cos + s * sin)
        v = e * (lam * (c * cos + s * sin) + om * (-c * sin + s * cos))
        return x, v
    mu = math.sqrt(0.25 * alpha * alpha - 1.0)
    lp, lm = lam + mu, lam - mu
    a_coef = (v0 - lm * x0) / (lp - lm)
    b_coef = x0 - a_coef
    x = a_coef * math.exp(lp * t) + b_coef * math.exp(lm * t)
    v = a_coef * lp * math.exp(lp * t) + b_coef * lm * math.exp(lm * t)
    return x, v


def exact_forced_solution(
    alpha: float, beta: float, omega: float, x0: float, v0: float, t: float
):
    """Closed-form solution of xddot = -x - alpha xdot + beta sin(omega t)."""
    denom = (1.0 - omega * omega) ** 2 + (alpha * omega) ** 2
    if denom <= 1e-14:
        raise ResonanceError(
            "alpha = 0 with omega = 1 drives the oscillator at resonance"
        )

    def particular(s):
        c1 = beta * (1.0 - omega * omega) / denom
        c2 = -beta * alpha * omega / denom
        xp = c1 * math.sin(omega * s) + c2 * math.cos(omega * s)
        vp = omega * (c1 * math.cos(omega * s) - c2 * math.sin(omega * s))
        return xp, vp

    xp0, vp0 = particular(0.0)
    xh, vh = exact_damped_solution(alpha, x0 - xp0, v0 - vp0, t)
    xpt, vpt = particular(t)
    return xh + xpt, vh + vpt
