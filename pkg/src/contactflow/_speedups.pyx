# cython: boundscheck=False, wraparound=False, cdivision=False
"""Compiled integration loops for the built-in scalar harmonic systems.

Every kernel mirrors the per-step arithmetic of the corresponding pure
Python stepper expression by expression, with explicit parentheses fixing
the same floating-point evaluation order.  Results are bit-identical to
the Python backend; the tests assert exact equality.
"""

import numpy as np

from libc.math cimport fabs, sin

from .errors import NoConvergence, SingularUpdate

cdef int _Z_NEWTON_MAXIT = 50
cdef double _SINGULAR_TOL = 1e-12


cdef inline double _force(double beta, double omega, double t) noexcept:
    return beta * sin(omega * t)


def run_contact1(double a, double h, Py_ssize_t n, double x0, double p0, double z0):
    xs = np.empty(n + 1)
    ps = np.empty(n + 1)
    zs = np.empty(n + 1)
    cdef double[::1] xv = xs, pv = ps, zv = zs
    cdef double x = x0, p = p0, z = z0
    cdef double x1, p1, d, lval
    cdef Py_ssize_t j
    xv[0] = x; pv[0] = p; zv[0] = z
    for j in range(n):
        x1 = x + ((h * (1.0 - (h * a))) * p) - (((0.5 * h) * h) * x)
        p1 = ((1.0 - (h * a)) * p) - ((0.5 * h) * (x1 + x))
        d = (x1 - x) / h
        lval = ((0.5 * (d * d)) - (0.5 * ((0.5 * (x * x)) + (0.5 * (x1 * x1))))) - (a * z)
        z = z + (h * lval)
        x = x1; p = p1
        xv[j + 1] = x; pv[j + 1] = p; zv[j + 1] = z
    return xs, ps, zs


def run_contact2(double a, double h, Py_ssize_t n, double x0, double p0, double z0):
    xs = np.empty(n + 1)
    ps = np.empty(n + 1)
    zs = np.empty(n + 1)
    cdef double[::1] xv = xs, pv = ps, zv = zs
    cdef double b = (0.5 * h) * a
    cdef double x = x0, p = p0, z = z0
    cdef double x1, p1, d, kin
    cdef Py_ssize_t j
    xv[0] = x; pv[0] = p; zv[0] = z
    for j in range(n):
        x1 = x + ((h * (1.0 - b)) * p) - (((0.5 * h) * h) * x)
        p1 = (((1.0 - b) * p) - ((0.5 * h) * (x1 + x))) / (1.0 + b)
        d = (x1 - x) / h
        kin = (0.5 * (d * d)) - (0.5 * ((0.5 * (x * x)) + (0.5 * (x1 * x1))))
        z = ((z * (1.0 - b)) + (h * kin)) / (1.0 + b)
        x = x1; p = p1
        xv[j + 1] = x; pv[j + 1] = p; zv[j + 1] = z
    return xs, ps, zs


def run_contact_quad_z(double a, double h, Py_ssize_t n, double x0, double p0, double z0):
    xs = np.empty(n + 1)
    ps = np.empty(n + 1)
    zs = np.empty(n + 1)
    cdef double[::1] xv = xs, pv = ps, zv = zs
    cdef double x = x0, p = p0, z = z0
    cdef double c0, c1, x1, d, kin, z1, g, gp
    cdef Py_ssize_t j
    cdef int it
    cdef bint converged
    xv[0] = x; pv[0] = p; zv[0] = z
    for j in range(n):
        c0 = 1.0 - (((0.5 * h) * a) * z)
        x1 = x + ((h * c0) * p) - (((0.5 * h) * h) * x)
        d = (x1 - x) / h
        kin = (0.5 * (d * d)) - (0.5 * ((0.5 * (x * x)) + (0.5 * (x1 * x1))))
        z1 = z + (h * (kin - (((0.5 * a) * z) * z)))
        converged = False
        for it in range(_Z_NEWTON_MAXIT):
            g = (z1 - z) - (h * (kin - ((0.25 * a) * ((z * z) + (z1 * z1)))))
            if fabs(g) <= (1e-12 * (1.0 + fabs(z1))):
                converged = True
                break
            gp = 1.0 + (((0.5 * h) * a) * z1)
            if fabs(gp) < _SINGULAR_TOL:
                raise SingularUpdate(f"|1 + (h/2) alpha z1| = {fabs(gp)}")
            z1 = z1 - (g / gp)
        if not converged:
            raise NoConvergence(
                f"z-update did not converge in {_Z_NEWTON_MAXIT} iterations"
            )
        c1 = 1.0 + (((0.5 * h) * a) * z1)
        if fabs(c1) < _SINGULAR_TOL:
            raise SingularUpdate(f"|1 + (h/2) alpha z1| = {fabs(c1)}")
        p = ((c0 * p) - ((0.5 * h) * (x + x1))) / c1
        x = x1; z = z1
        xv[j + 1] = x; pv[j + 1] = p; zv[j + 1] = z
    return xs, ps, zs


def run_contact2_forced(
    double a, double beta, double omega, double h, Py_ssize_t n,
    double x0, double p0, double z0, double t0,
):
    xs = np.empty(n + 1)
    ps = np.empty(n + 1)
    zs = np.empty(n + 1)
    cdef double[::1] xv = xs, pv = ps, zv = zs
    cdef double b = (0.5 * h) * a
    cdef double x = x0, p = p0, z = z0, t = t0
    cdef double ft, fth, x1, p1, d, kin
    cdef Py_ssize_t j
    xv[0] = x; pv[0] = p; zv[0] = z
    for j in range(n):
        ft = _force(beta, omega, t)
        fth = _force(beta, omega, t + h)
        x1 = x + ((h * (1.0 - b)) * p) - (((0.5 * h) * h) * x)
        x1 = x1 + (((0.5 * h) * h) * ft)
        p1 = (((1.0 - b) * p) - ((0.5 * h) * (x1 + x))) / (1.0 + b)
        p1 = p1 + (((0.5 * h) * (fth + ft)) / (1.0 + b))
        d = (x1 - x) / h
        kin = ((0.5 * (d * d)) - (0.5 * ((0.5 * (x * x)) + (0.5 * (x1 * x1))))) + (
            0.5 * ((ft * x) + (fth * x1))
        )
        z = ((z * (1.0 - b)) + (h * kin)) / (1.0 + b)
        x = x1; p = p1; t = t + h
        xv[j + 1] = x; pv[j + 1] = p; zv[j + 1] = z
    return xs, ps, zs


def run_leapfrog(
    double a, double beta, double omega, double h, Py_ssize_t n,
    double x0, double pi0, double t0,
):
    xs = np.empty(n + 1)
    ps = np.empty(n + 1)
    cdef double[::1] xv = xs, pv = ps
    cdef bint forced = beta != 0.0 or omega != 0.0
    cdef double x = x0, pi = pi0, t = t0
    cdef double num, ph, x1
    cdef Py_ssize_t j
    xv[0] = x; pv[0] = pi
    for j in range(n):
        num = pi - ((0.5 * h) * x)
        if forced:
            num = num + ((0.5 * h) * _force(beta, omega, t))
        ph = num / (1.0 + ((0.5 * h) * a))
        x1 = x + (h * ph)
        pi = ph - ((0.5 * h) * (x1 + (a * ph)))
        if forced:
            pi = pi + ((0.5 * h) * _force(beta, omega, t + h))
        x = x1; t = t + h
        xv[j + 1] = x; pv[j + 1] = pi
    return xs, ps


def run_ruth3(
    double a, double beta, double omega, double h, Py_ssize_t n,
    double x0, double p0, double t0,
):
    xs = np.empty(n + 1)
    ps = np.empty(n + 1)
    cdef double[::1] xv = xs, pv = ps
    cdef bint forced = beta != 0.0 or omega != 0.0
    cdef double[3] kicks
    cdef double[3] drifts
    kicks[0] = 7.0 / 24.0; kicks[1] = 0.75; kicks[2] = -1.0 / 24.0
    drifts[0] = 2.0 / 3.0; drifts[1] = -2.0 / 3.0; drifts[2] = 1.0
    cdef double x = x0, p = p0, t = t0
    cdef double t_sub, acc
    cdef Py_ssize_t j
    cdef int s
    xv[0] = x; pv[0] = p
    for j in range(n):
        t_sub = t
        for s in range(3):
            acc = (-x) - (p * a)
            if forced:
                acc = acc + _force(beta, omega, t_sub)
            p = p + ((h * kicks[s]) * acc)
            x = x + ((h * drifts[s]) * p)
            t_sub = t_sub + (h * drifts[s])
        t = t + h
        xv[j + 1] = x; pv[j + 1] = p
    return xs, ps


def run_rk4(
    double a, double beta, double omega, double h, Py_ssize_t n,
    double x0, double p0, double z0, double t0,
):
    xs = np.empty(n + 1)
    ps = np.empty(n + 1)
    zs = np.empty(n + 1)
    cdef double[::1] xv = xs, pv = ps, zv = zs
    cdef bint forced = beta != 0.0 or omega != 0.0
    cdef double x = x0, p = p0, z = z0, t = t0
    cdef double k1x, k1p, k1z, k2x, k2p, k2z, k3x, k3p, k3z, k4x, k4p, k4z
    cdef double sx, sp, sz, st
    cdef Py_ssize_t j
    xv[0] = x; pv[0] = p; zv[0] = z
    for j in range(n):
        # stage 1
        k1x = p
        k1p = (-x) - (p * a)
        k1z = ((0.5 * (p * p)) - (0.5 * (x * x))) - (a * z)
        if forced:
            k1p = k1p + _force(beta, omega, t)
            k1z = k1z + (_force(beta, omega, t) * x)
        # stage 2
        st = t + (0.5 * h)
        sx = x + ((0.5 * h) * k1x); sp = p + ((0.5 * h) * k1p); sz = z + ((0.5 * h) * k1z)
        k2x = sp
        k2p = (-sx) - (sp * a)
        k2z = ((0.5 * (sp * sp)) - (0.5 * (sx * sx))) - (a * sz)
        if forced:
            k2p = k2p + _force(beta, omega, st)
            k2z = k2z + (_force(beta, omega, st) * sx)
        # stage 3
        sx = x + ((0.5 * h) * k2x); sp = p + ((0.5 * h) * k2p); sz = z + ((0.5 * h) * k2z)
        k3x = sp
        k3p = (-sx) - (sp * a)
        k3z = ((0.5 * (sp * sp)) - (0.5 * (sx * sx))) - (a * sz)
        if forced:
            k3p = k3p + _force(beta, omega, st)
            k3z = k3z + (_force(beta, omega, st) * sx)
        # stage 4
        st = t + h
        sx = x + (h * k3x); sp = p + (h * k3p); sz = z + (h * k3z)
        k4x = sp
        k4p = (-sx) - (sp * a)
        k4z = ((0.5 * (sp * sp)) - (0.5 * (sx * sx))) - (a * sz)
        if forced:
            k4p = k4p + _force(beta, omega, st)
            k4z = k4z + (_force(beta, omega, st) * sx)
        x = x + ((h / 6.0) * (((k1x + (2.0 * k2x)) + (2.0 * k3x)) + k4x))
        p = p + ((h / 6.0) * (((k1p + (2.0 * k2p)) + (2.0 * k3p)) + k4p))
        z = z + ((h / 6.0) * (((k1z + (2.0 * k2z)) + (2.0 * k3z)) + k4z))
        t = t + h
        xv[j + 1] = x; pv[j + 1] = p; zv[j + 1] = z
    return xs, ps, zs


def run_vnc(
    double a, double beta, double omega, double h, Py_ssize_t n,
    double x0, double p0, double t0,
):
    """Two-step recursion with the Taylor bootstrap (the only seed the
    compiled path handles)."""
    xs = np.empty(n + 1)
    cdef double[::1] xv = xs
    cdef bint forced = beta != 0.0 or omega != 0.0
    cdef double xp, xc, x1, t1, num
    cdef Py_ssize_t j
    xv[0] = x0
    if n >= 1:
        x1 = (x0 + (h * p0)) - (((0.5 * h) * h) * (x0 + (a * p0)))
        if forced:
            x1 = x1 + (((0.5 * h) * h) * _force(beta, omega, t0))
        xv[1] = x1
        xp = x0; xc = x1; t1 = t0 + h
        for j in range(1, n):
            num = ((((2.0 * xc) - xp) / (h * h)) + ((a * xp) / (2.0 * h))) - xc
            if forced:
                num = num + _force(beta, omega, t1)
            xp = xc
            xc = num / ((1.0 / (h * h)) + (a / (2.0 * h)))
            t1 = t1 + h
            xv[j + 1] = xc
    return xs
