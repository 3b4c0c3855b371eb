"""Numerical verification that one-step maps are contact transformations.

The check works on the pullback of the contact form dz - p dx: for a map
s -> s+ with finite-difference Jacobian J, the row covector
w = eta(s+) J must be a scalar multiple of eta(s).  The scalar is the
measured conformal factor; the remainder is the pullback residual.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ContactState, OscillatorSystem, Trajectory
from .errors import MismatchedTrajectories
from .integrators import StepperId, _STEP_FNS
from .variational import DiscreteLagrangian, discrete_conformal_factor

__all__ = [
    "ContactCheckReport",
    "one_step_jacobian",
    "contactness_check",
    "conformal_factor_prediction",
    "cumulative_conformal",
    "hamiltonian_decay_report",
    "pi_p_relation_check",
]

DEFAULT_FD_EPS = 1e-6


@dataclass(frozen=True)
class ContactCheckReport:
    point: ContactState
    pullback_residual: float
    measured_factor: float
    predicted_factor: float
    fd_step: float

    def __post_init__(self):
        if not np.isfinite(self.predicted_factor):
            raise ValueError("predicted conformal factor must be finite")


def _flatten(state: ContactState) -> np.ndarray:
    return np.concatenate([state.x, state.p, [state.z]])


def _unflatten(vec: np.ndarray, t: float, n: int) -> ContactState:
    return ContactState(t=t, x=vec[:n], p=vec[n : 2 * n], z=float(vec[2 * n]))


def _step_map(stepper, sys, h):
    if isinstance(stepper, StepperId):
        fn = _STEP_FNS[stepper]
        return lambda state: fn(sys, state, h)
    return lambda state: stepper(sys, state, h)


def one_step_jacobian(
    stepper, sys: OscillatorSystem, state: ContactState, h: float, fd_eps: float = DEFAULT_FD_EPS
) -> np.ndarray:
    """Central-difference Jacobian of (x, p, z) -> (x+, p+, z+) at fixed t."""
    step = _step_map(stepper, sys, h)
    n = state.dim
    m = 2 * n + 1
    base = _flatten(state)
    jac = np.empty((m, m))
    for k in range(m):
        e = fd_eps * max(1.0, abs(base[k]))
        hi, lo = base.copy(), base.copy()
        hi[k] += e
        lo[k] -= e
        shi = _flatten(step(_unflatten(hi, state.t, n)))
        slo = _flatten(step(_unflatten(lo, state.t, n)))
        jac[:, k] = (shi - slo) / (2.0 * e)
    return jac


def _eta(state: ContactState) -> np.ndarray:
    """Row covector of dz - p dx: (-p | 0 | 1)."""
    n = state.dim
    row = np.zeros(2 * n + 1)
    row[:n] = -state.p
    row[-1] = 1.0
    return row


def contactness_check(
    stepper,
    sys: OscillatorSystem,
    state: ContactState,
    h: float,
    fd_eps: float = DEFAULT_FD_EPS,
    predicted_factor: float | None = None,
) -> ContactCheckReport:
    """Measure how well one step pulls dz - p dx back to a multiple of itself."""
    step = _step_map(stepper, sys, h)
    jac = one_step_jacobian(stepper, sys, state, h, fd_eps)
    state_next = step(state)
    w = _eta(state_next) @ jac
    c = float(w[-1])
    residual = float(np.max(np.abs(w - c * _eta(state))))
    if predicted_factor is None:
        predicted_factor = c
    return ContactCheckReport(
        point=state,
        pullback_residual=residual,
        measured_factor=c,
        predicted_factor=float(predicted_factor),
        fd_step=fd_eps,
    )


def conformal_factor_prediction(
    L: DiscreteLagrangian, x0, x1, z0: float, z1: float, t0: float, h: float
) -> float:
    """Predicted per-step factor (1 + h D3 L) / (1 - h D4 L)."""
    return discrete_conformal_factor(L, x0, x1, z0, z1, t0, h)


def cumulative_conformal(traj: Trajectory, L: DiscreteLagrangian) -> np.ndarray:
    """Running product of per-step predicted factors along a trajectory,
    starting at 1."""
    n = traj.n_steps
    out = np.empty(n + 1)
    out[0] = 1.0
    times = traj.times
    for j in range(n):
        f = discrete_conformal_factor(
            L,
            traj.xs[j],
            traj.xs[j + 1],
            float(traj.zs[j]),
            float(traj.zs[j + 1]),
            float(times[j]),
            traj.h,
        )
        out[j + 1] = out[j] * f
    return out


def hamiltonian_decay_report(traj: Trajectory, sys: OscillatorSystem) -> np.ndarray:
    """Deviation of H from its exact decay law.

    Linear damping: H_j - H_0 exp(-alpha t_j).  Quadratic damping: residual
    of (H_{j+1} - H_j)/h + alpha z_{j+1/2} H_{j+1/2} with midpoint averages.
    """
    from .core import DampingKind, contact_hamiltonian

    H = traj.diagnostics.get("H")
    if H is None:
        H = np.array(
            [contact_hamiltonian(sys, traj.state(j)) for j in range(traj.n_steps + 1)]
        )
    if sys.damping is DampingKind.LINEAR_Z:
        rel_t = traj.times - traj.t0
        return H - H[0] * np.exp(-sys.alpha * rel_t)
    z_mid = 0.5 * (traj.zs[:-1] + traj.zs[1:])
    H_mid = 0.5 * (H[:-1] + H[1:])
    return (H[1:] - H[:-1]) / traj.h + sys.alpha * z_mid * H_mid


def pi_p_relation_check(
    contact_traj: Trajectory,
    leapfrog_traj: Trajectory,
    sys: OscillatorSystem,
    h: float,
) -> float:
    """Max residual of pi = (1 - h^2 a^2/4) p - (h^2/4) a V'(x) along two
    trajectories sharing their x-history."""
    if contact_traj.xs.shape != leapfrog_traj.xs.shape:
        raise MismatchedTrajectories("trajectories have different lengths")
    gap = float(np.max(np.abs(contact_traj.xs - leapfrog_traj.xs)))
    if gap > 1e-10:
        raise MismatchedTrajectories(f"x-histories differ by {gap}")
    a = sys.alpha
    worst = 0.0
    for j in range(contact_traj.n_steps + 1):
        predicted = (1.0 - 0.25 * h * h * a * a) * contact_traj.ps[j] - (
            0.25 * h * h * a
        ) * sys.Vp(contact_traj.xs[j])
        worst = max(worst, float(np.max(np.abs(leapfrog_traj.ps[j] - predicted))))
    return worst
