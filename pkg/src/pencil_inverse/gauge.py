"""Rotation gauge from the shifted-AKNS normal form to the pencil form.

For Q = h I + [[q1, q2], [q2, -q1]] the angle theta solves

    theta' = q1 cos 2theta - q2 sin 2theta + h,   theta(0) = 0,

and P = R^{-1} (Q - theta' I) R with R = exp(theta J) has a vanishing (1, 1)
entry.  The two operators are isospectral exactly when theta(1) is a multiple
of pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dirac import DiracPotential
from .errors import DomainError, InconsistentAngleError, IntegrationError, QuantizationError
from .grid import GridFn, antiderivative, cubic_samples
from .pencil import PencilPotentials

QUANT_TOL = 1e-3
P11_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class GaugeAngle:
    theta: GridFn
    theta_prime: GridFn
    h: float
    quantization_n: int
    quantization_residual: float


def _rhs(q1, q2, h, theta):
    return q1 * np.cos(2.0 * theta) - q2 * np.sin(2.0 * theta) + h


def solve_theta(Q: DiracPotential) -> GaugeAngle:
    if Q.form != "shifted-akns":
        raise DomainError("solve_theta expects a shifted-AKNS potential")
    q1, q2 = Q.q1, Q.q2
    q1m, q2m = cubic_samples(q1, 0.5), cubic_samples(q2, 0.5)
    theta = _kernels.gauge_angle(q1, q2, q1m, q2m, float(Q.h), Q.grid.step)
    if not np.all(np.isfinite(theta)):
        raise IntegrationError("gauge angle integration failed")
    n = int(round(theta[-1] / math.pi))
    return GaugeAngle(
        GridFn(Q.grid, theta),
        GridFn(Q.grid, _rhs(q1, q2, Q.h, theta)),
        float(Q.h),
        n,
        abs(float(theta[-1]) - math.pi * n),
    )


def check_quantization(angle: GaugeAngle, tol: float = QUANT_TOL) -> int:
    """Nearest n with theta(1) ~ pi n; raises QuantizationError beyond ``tol``."""
    if angle.quantization_residual > tol:
        raise QuantizationError(
            f"quantization violated: theta(1)={angle.theta.values[-1]:.6g} is "
            f"{angle.quantization_residual:.3g} away from pi*{angle.quantization_n}",
            n=angle.quantization_n,
            residual=angle.quantization_residual,
        )
    return angle.quantization_n


def rotation_entries(theta: np.ndarray):
    """(sin 2theta, cos 2theta), the entries of exp(2 theta J) J1."""
    return np.sin(2.0 * theta), np.cos(2.0 * theta)


def q_to_p(Q: DiracPotential, angle: GaugeAngle) -> DiracPotential:
    """Pencil-form potential gauge-equivalent to Q."""
    if Q.form != "shifted-akns":
        raise DomainError("q_to_p expects a shifted-AKNS potential")
    s, c = rotation_entries(angle.theta.values)
    tp = angle.theta_prime.values
    rot11 = Q.q1 * c - Q.q2 * s
    p11 = Q.h - tp + rot11
    if np.max(np.abs(p11)) > P11_TOL:
        raise InconsistentAngleError(
            f"gauge angle does not belong to this potential: max |p11| = {np.max(np.abs(p11)):.3g}"
        )
    p12 = Q.q1 * s + Q.q2 * c
    p22 = 2.0 * (Q.h - tp)
    return DiracPotential.from_entries(Q.grid, 0.0, p12, p22, form="pencil")


def p_to_q(P: DiracPotential, angle: GaugeAngle) -> DiracPotential:
    """Inverse rotation: the shifted-AKNS potential R P R^{-1} + theta' I."""
    s, c = rotation_entries(angle.theta.values)
    tp = angle.theta_prime.values
    half = 0.5 * P.p22
    # P - (p22/2) I is traceless symmetric with AKNS entries (-p22/2, p12)
    a, b = -half, P.p12
    q1 = a * c + b * s
    q2 = -a * s + b * c
    shift = half + tp
    h = float(np.mean(shift))
    if np.max(np.abs(shift - h)) > 1e-8 * max(1.0, abs(h)):
        raise InconsistentAngleError("p22/2 + theta' is not constant; angle and potential disagree")
    return DiracPotential.shifted_akns(P.grid, q1, q2, h)


def extract_pq(P: DiracPotential) -> PencilPotentials:
    """p = p22 / 2 and the primitive r = -p12 + int p12^2 of q."""
    if P.form != "pencil":
        raise DomainError("extract_pq expects a pencil-form potential")
    p12 = P.mat.e12
    r = antiderivative(GridFn(P.grid, p12.values**2), order=4).values - p12.values
    return PencilPotentials(GridFn(P.grid, 0.5 * P.p22), GridFn(P.grid, r))
