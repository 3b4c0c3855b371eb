"""Generic discrete-Herglotz stepping engine.

A DiscreteLagrangian bundles L(x_j, x_{j+1}, z_j, z_{j+1}, t_j; h) with its
four partial derivatives D1..D4.  Everything downstream (the z-update, the
discrete Euler-Lagrange residual, the discrete Legendre transforms and the
position-momentum contact map) works for any such bundle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import ContactState, DampingKind, OscillatorSystem, _as_vec
from .errors import NoConvergence, SingularJacobian, SingularUpdate

__all__ = [
    "DiscreteLagrangian",
    "StepTriple",
    "rayleigh_first_order",
    "rayleigh_midpoint",
    "quadratic_z_midpoint",
    "forced_midpoint",
    "solve_z_update",
    "dgel_residual",
    "solve_next_position",
    "legendre_minus",
    "legendre_plus",
    "position_momentum_step",
    "discrete_conformal_factor",
]

NEWTON_TOL = 1e-12
NEWTON_MAXIT = 50
_SINGULAR_TOL = 1e-12
_JAC_FD = 1e-7


@dataclass(frozen=True)
class DiscreteLagrangian:
    """L and its partial derivatives; all callables share the signature
    (x0, x1, z0, z1, t0, h) with t1 = t0 + h implied."""

    eval: Callable
    d1: Callable  # gradient w.r.t. x0, vector
    d2: Callable  # gradient w.r.t. x1, vector
    d3: Callable  # derivative w.r.t. z0, scalar
    d4: Callable  # derivative w.r.t. z1, scalar
    depends_on_z_next: bool

    @classmethod
    def from_eval(cls, eval_fn, depends_on_z_next=True) -> "DiscreteLagrangian":
        """Build the derivative bundle by central finite differences."""

        def d_vec(which):
            def deriv(x0, x1, z0, z1, t0, h):
                x0, x1 = _as_vec(x0), _as_vec(x1)
                base = [x0, x1]
                out = np.empty_like(base[which])
                for k in range(out.size):
                    e = _JAC_FD * max(1.0, abs(base[which][k]))
                    hi = [a.copy() for a in base]
                    lo = [a.copy() for a in base]
                    hi[which][k] += e
                    lo[which][k] -= e
                    out[k] = (
                        eval_fn(hi[0], hi[1], z0, z1, t0, h)
                        - eval_fn(lo[0], lo[1], z0, z1, t0, h)
                    ) / (2.0 * e)
                return out

            return deriv

        def d_scal(which):
            def deriv(x0, x1, z0, z1, t0, h):
                z = [z0, z1]
                e = _JAC_FD * max(1.0, abs(z[which]))
                hi, lo = list(z), list(z)
                hi[which] += e
                lo[which] -= e
                return (
                    eval_fn(x0, x1, hi[0], hi[1], t0, h)
                    - eval_fn(x0, x1, lo[0], lo[1], t0, h)
                ) / (2.0 * e)

            return deriv

        return cls(
            eval=eval_fn,
            d1=d_vec(0),
            d2=d_vec(1),
            d3=d_scal(0),
            d4=d_scal(1),
            depends_on_z_next=depends_on_z_next,
        )


@dataclass(frozen=True)
class StepTriple:
    """One window (x_prev, x_cur, x_next) of a discrete curve, with the
    matching z values, the time of x_cur and the step size."""

    x_prev: np.ndarray
    x_cur: np.ndarray
    x_next: np.ndarray
    z_prev: float
    z_cur: float
    z_next: float
    t_cur: float
    h: float

    def __post_init__(self):
        object.__setattr__(self, "x_prev", _as_vec(self.x_prev))
        object.__setattr__(self, "x_cur", _as_vec(self.x_cur))
        object.__setattr__(self, "x_next", _as_vec(self.x_next))


def _velocity_term(x0, x1, h):
    d = (x1 - x0) / h
    return 0.5 * float(d @ d)


def rayleigh_first_order(sys: OscillatorSystem) -> DiscreteLagrangian:
    """First-order discretization of the linear-damping Lagrangian; the
    damping term uses z_j only, so the z-update is explicit."""
    a = sys.alpha

    def eval_fn(x0, x1, z0, z1, t0, h):
        x0, x1 = _as_vec(x0), _as_vec(x1)
        return _velocity_term(x0, x1, h) - 0.5 * (sys.V(x0) + sys.V(x1)) - a * z0

    return DiscreteLagrangian(
        eval=eval_fn,
        d1=lambda x0, x1, z0, z1, t0, h: -(_as_vec(x1) - _as_vec(x0)) / h**2
        - 0.5 * sys.Vp(x0),
        d2=lambda x0, x1, z0, z1, t0, h: (_as_vec(x1) - _as_vec(x0)) / h**2
        - 0.5 * sys.Vp(x1),
        d3=lambda x0, x1, z0, z1, t0, h: -a,
        d4=lambda x0, x1, z0, z1, t0, h: 0.0,
        depends_on_z_next=False,
    )


def rayleigh_midpoint(sys: OscillatorSystem) -> DiscreteLagrangian:
    """Second-order discretization: damping term -alpha (z_j + z_{j+1})/2."""
    a = sys.alpha

    def eval_fn(x0, x1, z0, z1, t0, h):
        x0, x1 = _as_vec(x0), _as_vec(x1)
        return (
            _velocity_term(x0, x1, h)
            - 0.5 * (sys.V(x0) + sys.V(x1))
            - 0.5 * a * (z0 + z1)
        )

    return DiscreteLagrangian(
        eval=eval_fn,
        d1=lambda x0, x1, z0, z1, t0, h: -(_as_vec(x1) - _as_vec(x0)) / h**2
        - 0.5 * sys.Vp(x0),
        d2=lambda x0, x1, z0, z1, t0, h: (_as_vec(x1) - _as_vec(x0)) / h**2
        - 0.5 * sys.Vp(x1),
        d3=lambda x0, x1, z0, z1, t0, h: -0.5 * a,
        d4=lambda x0, x1, z0, z1, t0, h: -0.5 * a,
        depends_on_z_next=True,
    )


def quadratic_z_midpoint(sys: OscillatorSystem) -> DiscreteLagrangian:
    """Discretization of the quadratic-in-z damping term:
    -(alpha/4)(z_j^2 + z_{j+1}^2)."""
    if sys.damping is not DampingKind.QUADRATIC_Z:
        raise ValueError("quadratic_z_midpoint requires quadratic damping")
    a = sys.alpha

    def eval_fn(x0, x1, z0, z1, t0, h):
        x0, x1 = _as_vec(x0), _as_vec(x1)
        return (
            _velocity_term(x0, x1, h)
            - 0.5 * (sys.V(x0) + sys.V(x1))
            - 0.25 * a * (z0 * z0 + z1 * z1)
        )

    return DiscreteLagrangian(
        eval=eval_fn,
        d1=lambda x0, x1, z0, z1, t0, h: -(_as_vec(x1) - _as_vec(x0)) / h**2
        - 0.5 * sys.Vp(x0),
        d2=lambda x0, x1, z0, z1, t0, h: (_as_vec(x1) - _as_vec(x0)) / h**2
        - 0.5 * sys.Vp(x1),
        d3=lambda x0, x1, z0, z1, t0, h: -0.5 * a * z0,
        d4=lambda x0, x1, z0, z1, t0, h: -0.5 * a * z1,
        depends_on_z_next=True,
    )


def forced_midpoint(sys: OscillatorSystem) -> DiscreteLagrangian:
    """rayleigh_midpoint plus the trapezoidal forcing term
    (f(t_j) x_j + f(t_{j+1}) x_{j+1}) / 2 (scalar configuration)."""
    a = sys.alpha

    def eval_fn(x0, x1, z0, z1, t0, h):
        x0, x1 = _as_vec(x0), _as_vec(x1)
        return (
            _velocity_term(x0, x1, h)
            - 0.5 * (sys.V(x0) + sys.V(x1))
            - 0.5 * a * (z0 + z1)
            + 0.5 * (sys.f(t0) * float(x0[0]) + sys.f(t0 + h) * float(x1[0]))
        )

    def d1(x0, x1, z0, z1, t0, h):
        g = -(_as_vec(x1) - _as_vec(x0)) / h**2 - 0.5 * sys.Vp(x0)
        g[0] += 0.5 * sys.f(t0)
        return g

    def d2(x0, x1, z0, z1, t0, h):
        g = (_as_vec(x1) - _as_vec(x0)) / h**2 - 0.5 * sys.Vp(x1)
        g[0] += 0.5 * sys.f(t0 + h)
        return g

    return DiscreteLagrangian(
        eval=eval_fn,
        d1=d1,
        d2=d2,
        d3=lambda x0, x1, z0, z1, t0, h: -0.5 * a,
        d4=lambda x0, x1, z0, z1, t0, h: -0.5 * a,
        depends_on_z_next=True,
    )


def solve_z_update(L: DiscreteLagrangian, x0, x1, z0: float, t0: float, h: float) -> float:
    """Solve z1 = z0 + h L(x0, x1, z0, z1) for z1.

    Closed form (one evaluation) when L does not depend on z1, Newton from
    the explicit predictor otherwise.
    """
    x0, x1 = _as_vec(x0), _as_vec(x1)
    if not L.depends_on_z_next:
        return z0 + h * L.eval(x0, x1, z0, z0, t0, h)
    z1 = z0 + h * L.eval(x0, x1, z0, z0, t0, h)
    for _ in range(NEWTON_MAXIT):
        g = z1 - z0 - h * L.eval(x0, x1, z0, z1, t0, h)
        if abs(g) <= NEWTON_TOL * (1.0 + abs(z1)):
            return z1
        gp = 1.0 - h * L.d4(x0, x1, z0, z1, t0, h)
        if abs(gp) < _SINGULAR_TOL:
            raise SingularUpdate(f"|1 - h D4 L| = {abs(gp)} at z1 = {z1}")
        z1 -= g / gp
    raise NoConvergence(f"z-update did not converge in {NEWTON_MAXIT} iterations")


def dgel_residual(L: DiscreteLagrangian, triple: StepTriple) -> np.ndarray:
    """Residual of the discrete generalized Euler-Lagrange equations:
    D1 L(cur window) + D2 L(prev window) (1 + h D3 L(cur)) / (1 - h D4 L(prev)).
    """
    h, t = triple.h, triple.t_cur
    cur = (triple.x_cur, triple.x_next, triple.z_cur, triple.z_next, t, h)
    prev = (triple.x_prev, triple.x_cur, triple.z_prev, triple.z_cur, t - h, h)
    denom = 1.0 - h * L.d4(*prev)
    if abs(denom) < _SINGULAR_TOL:
        raise SingularUpdate(f"|1 - h D4 L| = {abs(denom)} on the previous window")
    return L.d1(*cur) + L.d2(*prev) * (1.0 + h * L.d3(*cur)) / denom


def _newton_vec(fun, x_guess, tol=NEWTON_TOL, maxit=NEWTON_MAXIT):
    """Newton iteration on a vector map with finite-difference Jacobian."""
    x = _as_vec(x_guess).copy()
    for _ in range(maxit):
        r = _as_vec(fun(x))
        if float(np.max(np.abs(r))) <= tol:
            return x
        n = x.size
        jac = np.empty((n, n))
        for k in range(n):
            e = _JAC_FD * max(1.0, abs(x[k]))
            hi, lo = x.copy(), x.copy()
            hi[k] += e
            lo[k] -= e
            jac[:, k] = (_as_vec(fun(hi)) - _as_vec(fun(lo))) / (2.0 * e)
        try:
            dx = np.linalg.solve(jac, r)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobian(str(exc)) from exc
        if not np.all(np.isfinite(dx)):
            raise SingularJacobian("non-finite Newton update")
        x = x - dx
    raise NoConvergence(f"Newton did not converge in {maxit} iterations")


def solve_next_position(
    L: DiscreteLagrangian,
    x_prev,
    x_cur,
    z_prev: float,
    z_cur: float,
    t: float,
    h: float,
    guess=None,
):
    """Solve the discrete EL equations for (x_next, z_next).

    Newton on x_next with the z-update solved at every iterate.
    """
    x_prev, x_cur = _as_vec(x_prev), _as_vec(x_cur)
    if guess is None:
        guess = 2.0 * x_cur - x_prev

    def residual(x_next):
        z_next = solve_z_update(L, x_cur, x_next, z_cur, t, h)
        return dgel_residual(
            L,
            StepTriple(x_prev, x_cur, x_next, z_prev, z_cur, z_next, t, h),
        )

    x_next = _newton_vec(residual, guess)
    z_next = solve_z_update(L, x_cur, x_next, z_cur, t, h)
    return x_next, z_next


def legendre_minus(
    L: DiscreteLagrangian, x_prev, x_cur, z_prev: float, z_cur: float, t: float, h: float
) -> np.ndarray:
    """Backward discrete Legendre transform: h D2 L / (1 - h D4 L) on the
    (prev, cur) window; t is the time of x_cur."""
    args = (_as_vec(x_prev), _as_vec(x_cur), z_prev, z_cur, t - h, h)
    denom = 1.0 - h * L.d4(*args)
    if abs(denom) < _SINGULAR_TOL:
        raise SingularUpdate(f"|1 - h D4 L| = {abs(denom)}")
    return h * L.d2(*args) / denom


def legendre_plus(
    L: DiscreteLagrangian, x_cur, x_next, z_cur: float, z_next: float, t: float, h: float
) -> np.ndarray:
    """Forward discrete Legendre transform: -h D1 L / (1 + h D3 L) on the
    (cur, next) window; t is the time of x_cur."""
    args = (_as_vec(x_cur), _as_vec(x_next), z_cur, z_next, t, h)
    denom = 1.0 + h * L.d3(*args)
    if abs(denom) < _SINGULAR_TOL:
        raise SingularUpdate(f"|1 + h D3 L| = {abs(denom)}")
    return -h * L.d1(*args) / denom


def position_momentum_step(
    L: DiscreteLagrangian, state: ContactState, h: float
) -> ContactState:
    """One step of the contact map on T*Q x R induced by L.

    Solves p_cur = legendre_plus(x_cur, x_next) for x_next (with the inner
    z-update), then reads the new momentum off legendre_minus.
    """
    x, p, z, t = state.x, state.p, state.z, state.t

    def residual(x_next):
        z_next = solve_z_update(L, x, x_next, z, t, h)
        return legendre_plus(L, x, x_next, z, z_next, t, h) - p

    x_next = _newton_vec(residual, x + h * p)
    z_next = solve_z_update(L, x, x_next, z, t, h)
    p_next = legendre_minus(L, x, x_next, z, z_next, t + h, h)
    return ContactState(t=t + h, x=x_next, p=p_next, z=z_next)


def discrete_conformal_factor(
    L: DiscreteLagrangian, x0, x1, z0: float, z1: float, t0: float, h: float
) -> float:
    """Per-step conformal factor (1 + h D3 L) / (1 - h D4 L)."""
    args = (_as_vec(x0), _as_vec(x1), z0, z1, t0, h)
    denom = 1.0 - h * L.d4(*args)
    if abs(denom) < _SINGULAR_TOL:
        raise SingularUpdate(f"|1 - h D4 L| = {abs(denom)}")
    return (1.0 + h * L.d3(*args)) / denom
