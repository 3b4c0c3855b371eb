"""Backend selection for the hot integration loops.

At import time we try the compiled extension (contactflow._speedups, built
from _speedups.pyx).  If it is missing the generic Python loops in
`integrators` are used.  Both paths execute the same floating-point
arithmetic step by step, so results are identical.
"""

from __future__ import annotations

import numpy as np

try:
    from . import _speedups

    HAVE_SPEEDUPS = True
except ImportError:
    _speedups = None
    HAVE_SPEEDUPS = False


def backend_name() -> str:
    return "compiled" if HAVE_SPEEDUPS else "python"


def run(stepper, sys, initial, h, n_steps):
    """Run a compiled loop for a scalar harmonic system.

    Returns (xs, ps, zs) with shapes (n+1, 1), (n+1, 1), (n+1,); zs is None
    for methods whose z is reconstructed by quadrature afterwards.
    """
    from .integrators import StepperId

    if not HAVE_SPEEDUPS:
        raise RuntimeError("compiled kernels are not available")
    a = sys.alpha
    beta = omega = 0.0
    if sys.forcing is not None:
        beta, omega = sys.forcing.beta, sys.forcing.omega
    x0, p0, z0, t0 = float(initial.x[0]), float(initial.p[0]), initial.z, initial.t

    if stepper is StepperId.CONTACT1:
        x, p, z = _speedups.run_contact1(a, h, n_steps, x0, p0, z0)
    elif stepper is StepperId.CONTACT2:
        x, p, z = _speedups.run_contact2(a, h, n_steps, x0, p0, z0)
    elif stepper is StepperId.CONTACT_QUAD_Z:
        x, p, z = _speedups.run_contact_quad_z(a, h, n_steps, x0, p0, z0)
    elif stepper is StepperId.CONTACT2_FORCED:
        x, p, z = _speedups.run_contact2_forced(a, beta, omega, h, n_steps, x0, p0, z0, t0)
    elif stepper is StepperId.RK4:
        x, p, z = _speedups.run_rk4(a, beta, omega, h, n_steps, x0, p0, z0, t0)
    elif stepper is StepperId.LEAPFROG:
        x, p = _speedups.run_leapfrog(a, beta, omega, h, n_steps, x0, p0, t0)
        z = None
    elif stepper is StepperId.RUTH3:
        x, p = _speedups.run_ruth3(a, beta, omega, h, n_steps, x0, p0, t0)
        z = None
    elif stepper is StepperId.VNC:
        x = _speedups.run_vnc(a, beta, omega, h, n_steps, x0, p0, t0)
        p = _vnc_momenta(x, p0, h)
        z = None
    else:
        raise RuntimeError(f"no compiled kernel for {stepper}")
    return x.reshape(-1, 1), p.reshape(-1, 1), z


def _vnc_momenta(x, p0, h):
    n = x.shape[0] - 1
    p = np.empty_like(x)
    p[0] = p0
    for j in range(1, n):
        p[j] = (x[j + 1] - x[j - 1]) / (2.0 * h)
    if n >= 2:
        p[n] = (3.0 * x[n] - 4.0 * x[n - 1] + x[n - 2]) / (2.0 * h)
    elif n == 1:
        p[1] = (x[1] - x[0]) / h
    return p
