"""Compiled inner loops.

All linear systems solved here have the traceless form

    u' = [[a(x), b(x)], [c(x), -a(x)]] u

with a, b, c supplied at the two Gauss-Legendre points of every cell (see
``gauss_samples``).  Each cell is advanced by the two-point Gauss-Legendre
Magnus step of order four, whose 2x2 exponential is evaluated in closed form.  Constant
coefficients are therefore propagated exactly, which keeps the phase of
high-index eigenfunctions free of the O((lambda h)^5) drift of Runge-Kutta.
"""

import math

import numpy as np
from numba import njit

from .grid import cubic_samples

_G1 = 0.5 - math.sqrt(3.0) / 6.0
_G2 = 0.5 + math.sqrt(3.0) / 6.0
_COMM = math.sqrt(3.0) / 12.0


def gauss_samples(values):
    """Cubic-interpolant samples of node values at the two Gauss points of each cell."""
    return cubic_samples(values, _G1), cubic_samples(values, _G2)


@njit(cache=True)
def _step_matrix(a_1, b_1, c_1, a_2, b_2, c_2, h):
    # [A2, A1] for traceless A = [[a, b], [c, -a]]
    ca = b_2 * c_1 - c_2 * b_1
    cb = 2.0 * (a_2 * b_1 - b_2 * a_1)
    cc = 2.0 * (c_2 * a_1 - a_2 * c_1)
    s = _COMM * h * h
    oa = 0.5 * h * (a_1 + a_2) + s * ca
    ob = 0.5 * h * (b_1 + b_2) + s * cb
    oc = 0.5 * h * (c_1 + c_2) + s * cc
    d = oa * oa + ob * oc
    if d > 0.0:
        r = math.sqrt(d)
        ch = math.cosh(r)
        sh = math.sinh(r) / r
    elif d < 0.0:
        r = math.sqrt(-d)
        ch = math.cos(r)
        sh = math.sin(r) / r
    else:
        ch = 1.0
        sh = 1.0
    return ch + sh * oa, sh * ob, sh * oc, ch - sh * oa


@njit(cache=True)
def propagate(a1, a2, b1, b2, c1, c2, h, y0, z0):
    """Solution samples of the traceless system; returns (y, z, bad_node)."""
    n = a1.shape[0] + 1
    y = np.empty(n)
    z = np.empty(n)
    y[0] = y0
    z[0] = z0
    for j in range(n - 1):
        e11, e12, e21, e22 = _step_matrix(a1[j], b1[j], c1[j], a2[j], b2[j], c2[j], h)
        y[j + 1] = e11 * y[j] + e12 * z[j]
        z[j + 1] = e21 * y[j] + e22 * z[j]
        if not (math.isfinite(y[j + 1]) and math.isfinite(z[j + 1])):
            return y, z, j + 1
    return y, z, -1


@njit(cache=True)
def dirac_angle(p11_1, p11_2, p12_1, p12_2, p22_1, p22_2, lam, h):
    """Unwrapped polar angle of the Dirac solution with u(0) = (1, 0).

    Arguments are Gauss-point samples of the potential entries.  Returns
    (terminal angle, bad_node).  The per-cell increment is taken in
    (-pi, pi], which is exact as long as (|lam| + |P|) h < pi.
    """
    n = p11_1.shape[0]
    u1 = 1.0
    u2 = 0.0
    phi = 0.0
    for j in range(n):
        e11, e12, e21, e22 = _step_matrix(
            p12_1[j], p22_1[j] - lam, lam - p11_1[j],
            p12_2[j], p22_2[j] - lam, lam - p11_2[j], h,
        )
        v1 = e11 * u1 + e12 * u2
        v2 = e21 * u1 + e22 * u2
        phi += math.atan2(u1 * v2 - u2 * v1, u1 * v1 + u2 * v2)
        rho = math.hypot(v1, v2)
        if not (math.isfinite(rho) and rho > 0.0):
            return phi, j + 1
        u1 = v1 / rho
        u2 = v2 / rho
    return phi, -1


@njit(cache=True)
def _theta_rhs(q1, q2, hshift, t):
    return q1 * math.cos(2.0 * t) - q2 * math.sin(2.0 * t) + hshift


@njit(cache=True)
def gauge_angle(q1, q2, q1m, q2m, hshift, h):
    """Classical RK4 for theta' = q1 cos 2theta - q2 sin 2theta + hshift.

    ``q1m``, ``q2m`` are the cell-midpoint values.
    """
    n = q1.shape[0]
    th = np.empty(n)
    th[0] = 0.0
    for j in range(n - 1):
        t = th[j]
        k1 = _theta_rhs(q1[j], q2[j], hshift, t)
        k2 = _theta_rhs(q1m[j], q2m[j], hshift, t + 0.5 * h * k1)
        k3 = _theta_rhs(q1m[j], q2m[j], hshift, t + 0.5 * h * k2)
        k4 = _theta_rhs(q1[j + 1], q2[j + 1], hshift, t + h * k3)
        th[j + 1] = t + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
    return th
