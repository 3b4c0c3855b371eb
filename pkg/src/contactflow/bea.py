"""Backward error analysis for the two linear-damping contact steppers.

The modified equations are known in closed form for the harmonic oscillator
with Rayleigh damping.  Truncations of them are integrated with a
high-accuracy reference method and plugged back into the difference
equations; the decay rate of the defect under h-refinement measures the
truncation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ContactState, DampingKind, OscillatorSystem
from .errors import UnsupportedSystem
from .integrators import StepperId, integrate

__all__ = [
    "ModifiedSystem",
    "modified_accel",
    "modified_zdot",
    "modified_lagrangian_contact1",
    "defect_order_estimate",
    "convergence_order_estimate",
    "loglog_slope",
]

_SUPPORTED = (StepperId.CONTACT1, StepperId.CONTACT2)


def _check_method(method: StepperId):
    if method not in _SUPPORTED:
        raise UnsupportedSystem(
            f"modified equations are only available for contact1/contact2, got {method}"
        )


def _check_system(sys: OscillatorSystem):
    if not sys.is_harmonic or sys.damping is not DampingKind.LINEAR_Z or sys.forcing is not None:
        raise UnsupportedSystem(
            "modified equations are only derived for the unforced harmonic "
            "oscillator with linear damping"
        )


def modified_accel(
    method: StepperId, alpha: float, x: float, v: float, z: float, h: float, k: int
) -> float:
    """Truncated modified acceleration; k = 0 is the original equation."""
    _check_method(method)
    a = alpha
    out = -x - a * v
    if method is StepperId.CONTACT1:
        if k >= 1:
            out -= 0.5 * h * a * a * v
        if k >= 2:
            out -= (h * h / 12.0) * ((a * a + 1.0) * x + 4.0 * a**3 * v)
    else:
        if k >= 2:
            out -= (h * h / 12.0) * (a**3 * v + a * a * x + x)
    return out


def modified_zdot(
    method: StepperId, alpha: float, x: float, v: float, z: float, h: float, k: int
) -> float:
    """Truncated modified action rate; k = 0 is the Lagrangian itself."""
    _check_method(method)
    a = alpha
    lag = 0.5 * v * v - 0.5 * x * x - a * z
    out = lag
    if method is StepperId.CONTACT1:
        if k >= 1:
            out += 0.5 * h * a * lag
        if k >= 2:
            out += (h * h / 24.0) * (
                (1.0 - 4.0 * a * a) * x * x
                + (5.0 * a * a - 2.0) * v * v
                + 4.0 * a * x * v
                - 8.0 * a**3 * z
            )
    else:
        if k >= 2:
            out += (h * h / 24.0) * (
                (1.0 - a * a) * x * x
                + (2.0 * a * a - 2.0) * v * v
                + 4.0 * a * x * v
                - 2.0 * a**3 * z
            )
    return out


def modified_lagrangian_contact1(alpha: float, x: float, v: float, z: float, h: float) -> float:
    """First-order modified Lagrangian of the contact1 stepper: a rescaling
    (1 + h alpha / 2) of the original Lagrangian."""
    return (1.0 + 0.5 * h * alpha) * (0.5 * v * v - 0.5 * x * x - alpha * z)


@dataclass(frozen=True)
class ModifiedSystem:
    """Truncated modified equations for one method at one truncation order."""

    method: StepperId
    alpha: float
    truncation_order: int

    def __post_init__(self):
        _check_method(self.method)
        if self.truncation_order not in (0, 1, 2):
            raise ValueError("truncation order must be 0, 1 or 2")

    @classmethod
    def for_system(cls, method: StepperId, sys: OscillatorSystem, k: int) -> "ModifiedSystem":
        _check_system(sys)
        return cls(method=method, alpha=sys.alpha, truncation_order=k)

    def accel(self, x, v, z, h):
        return modified_accel(self.method, self.alpha, x, v, z, h, self.truncation_order)

    def zdot(self, x, v, z, h):
        return modified_zdot(self.method, self.alpha, x, v, z, h, self.truncation_order)


def _rk4_modified(ms: ModifiedSystem, h: float, x0, v0, z0, t_end, n_grid, substeps=100):
    """Integrate the truncated modified system with RK4 at internal step
    h/substeps, sampling at the grid t_j = j h.  Returns (xs, zs)."""
    dt = h / substeps

    def field(x, v, z):
        return v, ms.accel(x, v, z, h), ms.zdot(x, v, z, h)

    xs = np.empty(n_grid + 1)
    zs = np.empty(n_grid + 1)
    x, v, z = float(x0), float(v0), float(z0)
    xs[0], zs[0] = x, z
    for j in range(n_grid):
        for _ in range(substeps):
            k1 = field(x, v, z)
            k2 = field(x + 0.5 * dt * k1[0], v + 0.5 * dt * k1[1], z + 0.5 * dt * k1[2])
            k3 = field(x + 0.5 * dt * k2[0], v + 0.5 * dt * k2[1], z + 0.5 * dt * k2[2])
            k4 = field(x + dt * k3[0], v + dt * k3[1], z + dt * k3[2])
            x += (dt / 6.0) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            v += (dt / 6.0) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            z += (dt / 6.0) * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        xs[j + 1], zs[j + 1] = x, z
    return xs, zs


def _discrete_defects(method: StepperId, alpha: float, h: float, xs, zs):
    """Max |defect| of the z-difference and second-order dgEL forms when a
    sampled modified-system solution is plugged in."""
    a = alpha
    dz_def = 0.0
    for j in range(len(xs) - 1):
        dmean = (xs[j + 1] - xs[j]) / h
        lag = 0.5 * dmean * dmean - 0.25 * (xs[j] ** 2 + xs[j + 1] ** 2)
        if method is StepperId.CONTACT1:
            lag -= a * zs[j]
        else:
            lag -= 0.5 * a * (zs[j] + zs[j + 1])
        dz_def = max(dz_def, abs((zs[j + 1] - zs[j]) / h - lag))
    dx_def = 0.0
    for j in range(1, len(xs) - 1):
        lhs = (xs[j + 1] - 2.0 * xs[j] + xs[j - 1]) / (h * h)
        damping = (xs[j] - xs[j - 1]) / h - 0.5 * h * xs[j]
        if method is StepperId.CONTACT1:
            rhs = -xs[j] - a * damping
        else:
            rhs = -xs[j] - a / (1.0 + 0.5 * h * a) * damping
        dx_def = max(dx_def, abs(lhs - rhs))
    return max(dz_def, dx_def)


def loglog_slope(hs, errs):
    """Least-squares slope of log(err) vs log(h); also returns the max
    absolute fit residual."""
    hs = np.asarray(hs, dtype=float)
    errs = np.asarray(errs, dtype=float)
    if np.any(errs <= 0.0):
        raise ValueError("errors must be positive for a log-log fit")
    coef = np.polyfit(np.log(hs), np.log(errs), 1)
    fit = np.polyval(coef, np.log(hs))
    return float(coef[0]), float(np.max(np.abs(fit - np.log(errs))))


def defect_order_estimate(
    method: StepperId,
    alpha: float,
    k: int,
    h_list,
    T: float,
    initial=(1.0, 0.0, 0.0),
):
    """Slope of the max discrete defect vs h for the k-truncated modified
    system.  Expected: about k+1 (contact2 skips the absent h^1 term)."""
    if len(h_list) < 3:
        raise ValueError("need at least 3 step sizes for a slope estimate")
    ms = ModifiedSystem(method=method, alpha=alpha, truncation_order=k)
    x0, v0, z0 = initial
    defects = []
    for h in h_list:
        n_grid = int(round(T / h))
        xs, zs = _rk4_modified(ms, h, x0, v0, z0, T, n_grid)
        defects.append(_discrete_defects(method, alpha, h, xs, zs))
    slope, _ = loglog_slope(h_list, defects)
    return slope


def convergence_order_estimate(
    stepper: StepperId,
    sys: OscillatorSystem,
    exact_fn,
    h_list,
    T: float,
    initial: ContactState | None = None,
    **integrate_kwargs,
):
    """Global-error slope at time T against an exact solution; exact_fn(t)
    returns the pair (x, p) and the error is the max over both components."""
    if initial is None:
        initial = ContactState(t=0.0, x=np.array([1.0]), p=np.array([0.0]), z=0.0)
    errs = []
    for h in h_list:
        n = int(round(T / h))
        if abs(n * h - T) > 1e-9:
            raise ValueError(f"T = {T} is not an integer multiple of h = {h}")
        traj = integrate(stepper, sys, initial, h, n, **integrate_kwargs)
        xe, pe = exact_fn(T)
        errs.append(
            max(
                abs(float(traj.xs[-1, 0]) - float(xe)),
                abs(float(traj.ps[-1, 0]) - float(pe)),
            )
        )
    slope, _ = loglog_slope(h_list, errs)
    return slope
