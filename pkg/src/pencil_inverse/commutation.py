"""Double commutation at lambda = 0 and the alpha0-independence check.

Changing the norming constant of the zero eigenvalue from alpha0 to
alpha0_tilde moves Q by the rank-one term

    Q* = c(x) [v v^T J - J v v^T],   c = -alpha* / (1 + alpha* int_0^x v^T v),

with alpha* = 1/alpha0_tilde - 1/alpha0 and v the eigenfunction at 0 with
v(0) = (1, 0).  All other spectral data are untouched, and the pencil
potentials (p, q) read off after the gauge rotation do not change either.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .dirac import DiracPotential, dirac_ivp, zero_mode
from .errors import DomainError, SingularCommutationError
from .gauge import GaugeAngle, p_to_q, rotation_entries
from .grid import Grid, GridFn, antiderivative, trapezoid_weights
from .pipeline import InverseResult, PipelineConfig, inverse
from .spectral import SpectralData

W_FLOOR = 1e-6


@dataclass(frozen=True, eq=False)
class CommutationParams:
    alpha0: float
    alpha0_tilde: float
    alpha_star: float
    w: GridFn

    @classmethod
    def build(cls, alpha0: float, alpha0_tilde: float, density: GridFn) -> "CommutationParams":
        """``w = 1 + alpha* int_0^x density`` with the positivity guard."""
        if not (alpha0 > 0.0 and alpha0_tilde > 0.0):
            raise DomainError("norming constants must be positive")
        a_star = 1.0 / alpha0_tilde - 1.0 / alpha0
        w = 1.0 + a_star * antiderivative(density, order=4).values
        bad = np.flatnonzero(w <= W_FLOOR)
        if bad.size:
            x = density.grid.nodes[bad[0]]
            raise SingularCommutationError(
                f"1 + alpha* int v^T v vanishes near x={x:.4g} (alpha*={a_star:.4g})"
            )
        return cls(float(alpha0), float(alpha0_tilde), a_star, GridFn(density.grid, w))


def zero_eigenfunction(Q: DiracPotential):
    """Solution of the Dirac system at lambda = 0 with v(0) = (1, 0)."""
    return dirac_ivp(Q, 0.0)


def commute_general(Q: DiracPotential, v, params: CommutationParams) -> DiracPotential:
    """Q + Q* for a shifted-AKNS Q and its zero eigenfunction ``v = (v1, v2)``."""
    v1, v2 = (np.asarray(getattr(f, "values", f), dtype=float) for f in v)
    c = -params.alpha_star / params.w.values
    # v v^T J - J v v^T = [[-2 v1 v2, v1^2 - v2^2], [v1^2 - v2^2, 2 v1 v2]]
    dq1 = -2.0 * c * v1 * v2
    dq2 = c * (v1 * v1 - v2 * v2)
    return DiracPotential.shifted_akns(Q.grid, Q.q1 + dq1, Q.q2 + dq2, Q.h)


def log_w_prime(u1: GridFn, params: CommutationParams) -> np.ndarray:
    """(log w)' = alpha* u1^2 / w."""
    return params.alpha_star * u1.values**2 / params.w.values


def commute_pencil_form(P: DiracPotential, theta: GaugeAngle, params: CommutationParams) -> DiracPotential:
    """Q + Q* with Q* = -(log w)' exp(2 theta J) J1 and Q rotated back from P."""
    if P.form != "pencil":
        raise DomainError("commute_pencil_form expects a pencil-form potential")
    Q = p_to_q(P, theta)
    u1, _ = zero_mode(P)
    lw = log_w_prime(u1, params)
    s, c = rotation_entries(theta.theta.values)
    return DiracPotential.shifted_akns(Q.grid, Q.q1 - lw * s, Q.q2 - lw * c, Q.h)


@dataclass(frozen=True)
class IndependenceTolerances:
    p: float = 1e-3
    r: float = 1e-3
    p22: float = 1e-8
    p12: float = 1e-6


@dataclass
class IndependenceReport:
    alpha0_a: float
    alpha0_b: float
    p_diff: float
    r_diff: float
    p22_diff: float
    p12_identity: float
    checks: dict = field(default_factory=dict)
    potentials_a: dict = field(default_factory=dict)
    potentials_b: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    @property
    def norms_ok(self) -> bool:
        """The two potential-level comparisons; the identities are diagnostics."""
        return self.checks.get("p", False) and self.checks.get("r", False)

    def to_dict(self) -> dict:
        return {
            "alpha0_a": self.alpha0_a,
            "alpha0_b": self.alpha0_b,
            "norms": {"p": self.p_diff, "r_mean_free": self.r_diff},
            "identities": {"p22": self.p22_diff, "p12_plus_log_w_prime": self.p12_identity},
            "checks": dict(self.checks),
            "ok": self.ok,
            "norms_ok": self.norms_ok,
            "potentials_a": self.potentials_a,
            "potentials_b": self.potentials_b,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def _l2(grid: Grid, f: np.ndarray) -> float:
    return float(np.sqrt(trapezoid_weights(grid) @ (f * f)))


def _mean_free(grid: Grid, f: np.ndarray) -> np.ndarray:
    return f - trapezoid_weights(grid) @ f


def compare_reconstructions(a: InverseResult, b: InverseResult,
                            tolerances: IndependenceTolerances = IndependenceTolerances()) -> IndependenceReport:
    grid = a.P.grid
    alpha_a, alpha_b = a.augmented.alpha0, b.augmented.alpha0
    u1, _ = zero_mode(a.P)
    params = CommutationParams.build(alpha_a, alpha_b, GridFn(grid, u1.values**2))
    p_diff = _l2(grid, a.potentials.p.values - b.potentials.p.values)
    r_diff = _l2(grid, _mean_free(grid, a.potentials.r.values) - _mean_free(grid, b.potentials.r.values))
    p22 = float(np.max(np.abs(b.P.p22 - a.P.p22)))
    p12 = float(np.max(np.abs(b.P.p12 - a.P.p12 + log_w_prime(u1, params))))
    checks = {
        "p": p_diff <= tolerances.p,
        "r": r_diff <= tolerances.r,
        "p22": p22 <= tolerances.p22,
        "p12": p12 <= tolerances.p12,
    }
    return IndependenceReport(alpha_a, alpha_b, p_diff, r_diff, p22, p12, checks,
                              a.potentials.to_dict(), b.potentials.to_dict())


def verify_alpha0_independence(sd: SpectralData, alpha0_a: float, alpha0_b: float,
                               config: PipelineConfig = PipelineConfig(),
                               tolerances: IndependenceTolerances = IndependenceTolerances()) -> IndependenceReport:
    """Run the inverse pipeline with two values of alpha0 and compare the outputs."""
    res_a = inverse(sd, replace(config, alpha0=float(alpha0_a)))
    res_b = inverse(sd, replace(config, alpha0=float(alpha0_b)))
    return compare_reconstructions(res_a, res_b, tolerances)
