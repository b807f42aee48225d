"""Direct spectral problem for Dirac operators ``J u' + P u = lambda u``.

Boundary conditions are ``u2(0) = u2(1) = 0``; eigenfunctions are normalised
by ``u(0) = (1, 0)``.  Eigenvalues are indexed by the terminal polar angle of
that solution: ``lambda_n`` is the unique root of ``phi(1; lambda) = pi n``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .errors import DomainError, IntegrationError, NotAnEigenvalueError, SearchError
from .grid import Grid, GridFn, MatrixGridFn, antiderivative, integrate, same_grid

FORMS = ("shifted-akns", "pencil", "general")

EIG_TOL = 1e-10
MAX_BRACKET = 10.0
RESIDUAL_TOL = 1e-6
WARM_BRACKET = 1e-3


@dataclass(frozen=True, eq=False)
class DiracPotential:
    """Real symmetric 2x2 potential with a form tag.

    ``shifted-akns``: P = h I + [[q1, q2], [q2, -q1]]; ``pencil``: P11 = 0.
    """

    mat: MatrixGridFn
    form: str = "general"
    h: Optional[float] = None

    def __post_init__(self):
        if self.form not in FORMS:
            raise DomainError(f"unknown potential form {self.form!r}")
        if not self.mat.is_symmetric(atol=1e-12):
            raise DomainError("Dirac potential must be symmetric")
        if self.form == "shifted-akns":
            if self.h is None:
                raise DomainError("shifted-AKNS potential needs a shift h")
            tr = self.mat.e11.values + self.mat.e22.values
            if np.max(np.abs(tr - 2.0 * self.h)) > 1e-9 * max(1.0, abs(self.h)):
                raise DomainError("shifted-AKNS potential must have trace 2h")
        if self.form == "pencil" and np.max(np.abs(self.mat.e11.values)) > 1e-8:
            raise DomainError("pencil-form potential must have P11 = 0")

    @property
    def grid(self) -> Grid:
        return self.mat.grid

    @property
    def p11(self) -> np.ndarray:
        return self.mat.e11.values

    @property
    def p12(self) -> np.ndarray:
        return self.mat.e12.values

    @property
    def p22(self) -> np.ndarray:
        return self.mat.e22.values

    @property
    def q1(self) -> np.ndarray:
        return 0.5 * (self.p11 - self.p22)

    @property
    def q2(self) -> np.ndarray:
        return self.p12

    @classmethod
    def from_entries(cls, grid: Grid, e11, e12, e22, form="general", h=None) -> "DiracPotential":
        def fn(v):
            return GridFn(grid, np.broadcast_to(np.asarray(v, dtype=float), (grid.m + 1,)))

        e12 = fn(e12)
        return cls(MatrixGridFn(fn(e11), e12, e12, fn(e22)), form, None if h is None else float(h))

    @classmethod
    def zero(cls, grid: Grid) -> "DiracPotential":
        return cls.from_entries(grid, 0.0, 0.0, 0.0, form="shifted-akns", h=0.0)

    @classmethod
    def shifted_akns(cls, grid: Grid, q1, q2, h: float) -> "DiracPotential":
        q1 = np.broadcast_to(np.asarray(q1, dtype=float), (grid.m + 1,))
        return cls.from_entries(grid, h + q1, q2, h - q1, form="shifted-akns", h=h)

    @classmethod
    def pencil(cls, p: GridFn, v: GridFn) -> "DiracPotential":
        """P = [[0, -v], [-v, 2p]]."""
        grid = same_grid(p, v)
        return cls.from_entries(grid, 0.0, -v.values, 2.0 * p.values, form="pencil")

    @cached_property
    def gauss(self) -> tuple:
        """Gauss-point samples (e11, e12, e22), each a pair of per-cell arrays."""
        return tuple(_kernels.gauss_samples(e) for e in (self.p11, self.p12, self.p22))

    def half_trace_integral(self) -> float:
        return 0.5 * integrate(self.mat.trace())

    def to_dict(self) -> dict:
        return {
            "m": self.grid.m,
            "form": self.form,
            "h": self.h,
            "e11": self.p11.tolist(),
            "e12": self.p12.tolist(),
            "e22": self.p22.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DiracPotential":
        grid = Grid(int(data["m"]))
        return cls.from_entries(grid, data["e11"], data["e12"], data["e22"],
                                form=data.get("form", "general"), h=data.get("h"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True, eq=False)
class Eigenpair:
    n: int
    lam: float
    alpha: float
    u1: GridFn
    u2: GridFn
    residual: float


def _raise_bad(node, what):
    raise IntegrationError(f"{what}: solution overflowed at grid node {node}", node=node)


def dirac_ivp(P: DiracPotential, lam: float):
    """Solve ``J u' + P u = lam u`` with ``u(0) = (1, 0)``; returns (u1, u2)."""
    (p11_1, p11_2), (p12_1, p12_2), (p22_1, p22_2) = P.gauss
    u1, u2, bad = _kernels.propagate(p12_1, p12_2, p22_1 - lam, p22_2 - lam,
                                     lam - p11_1, lam - p11_2, P.grid.step, 1.0, 0.0)
    if bad >= 0:
        _raise_bad(bad, f"Dirac IVP at lambda={lam}")
    return GridFn(P.grid, u1), GridFn(P.grid, u2)


def pruefer_terminal_angle(P: DiracPotential, lam: float) -> float:
    """Terminal polar angle phi(1; lam) of the solution with u(0) = (1, 0).

    Strictly increasing in ``lam``; for P = 0 it equals ``lam``.
    """
    (p11_1, p11_2), (p12_1, p12_2), (p22_1, p22_2) = P.gauss
    phi, bad = _kernels.dirac_angle(p11_1, p11_2, p12_1, p12_2, p22_1, p22_2, float(lam), P.grid.step)
    if bad >= 0:
        _raise_bad(bad, f"angle integration at lambda={lam}")
    return phi


def eigenvalue(P: DiracPotential, n: int, tol: float = EIG_TOL, guess: Optional[float] = None) -> float:
    """The eigenvalue with index ``n``, i.e. the root of phi(1; lam) = pi n.

    The bracket is centred at ``guess`` when given (warm start from a nearby
    potential), otherwise at pi n + (1/2) int tr P.
    """
    target = math.pi * n
    if guess is None:
        center, delta = target + P.half_trace_integral(), 0.5
    else:
        center, delta = float(guess), WARM_BRACKET

    def f(lam):
        return pruefer_terminal_angle(P, lam) - target

    while True:
        lo, hi = center - delta, center + delta
        flo, fhi = f(lo), f(hi)
        if flo <= 0.0 <= fhi:
            break
        if delta >= MAX_BRACKET:
            raise SearchError(f"no bracket for eigenvalue n={n} within +-{MAX_BRACKET} of {center:.6g}")
        delta = min(2.0 * delta, MAX_BRACKET)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    lam = brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    if abs(f(lam)) > tol:
        raise SearchError(f"eigenvalue n={n}: angle residual {abs(f(lam)):.3g} above {tol}")
    return lam


def _norm_and_residual(u1: GridFn, u2: GridFn):
    alpha = integrate(GridFn(u1.grid, u1.values**2 + u2.values**2), order=4)
    scale = float(np.max(np.hypot(u1.values, u2.values)))
    return alpha, abs(u2.values[-1]), scale


def norming_constant(P: DiracPotential, lam: float) -> float:
    """``alpha = ||u||^2`` for the eigenfunction with ``u(0) = (1, 0)``."""
    u1, u2 = dirac_ivp(P, lam)
    alpha, res, scale = _norm_and_residual(u1, u2)
    if res > RESIDUAL_TOL * scale:
        raise NotAnEigenvalueError(f"lambda={lam} is not an eigenvalue: |u2(1)|={res:.3g}")
    return alpha


def eigenpair(P: DiracPotential, n: int, guess: Optional[float] = None) -> Eigenpair:
    lam = eigenvalue(P, n, guess=guess)
    u1, u2 = dirac_ivp(P, lam)
    alpha, res, scale = _norm_and_residual(u1, u2)
    if res > RESIDUAL_TOL * scale:
        raise NotAnEigenvalueError(f"n={n}: |u2(1)|={res:.3g} at lambda={lam}")
    return Eigenpair(int(n), float(lam), float(alpha), u1, u2, float(res))


def dirac_spectral_data(P: DiracPotential, N: int, indices=None, guesses=None) -> list:
    """Eigenpairs for n = -N..N (or the given indices), sorted by n.

    ``guesses`` optionally maps an index to a starting eigenvalue.
    """
    if indices is None:
        if N < 1:
            raise DomainError("N must be positive")
        indices = range(-N, N + 1)
    guesses = guesses or {}
    pairs = [eigenpair(P, n, guesses.get(n)) for n in sorted(indices)]
    lams = [e.lam for e in pairs]
    if any(b <= a for a, b in zip(lams, lams[1:])):
        raise SearchError("computed eigenvalues are not strictly increasing")
    return pairs


def zero_mode(P: DiracPotential):
    """Kernel of a pencil-form Dirac operator: u1 = exp(-int v), v = -P12."""
    if P.form != "pencil":
        raise DomainError("zero_mode needs a pencil-form potential")
    u1 = GridFn(P.grid, np.exp(antiderivative(P.mat.e12, order=4).values))
    alpha0 = integrate(GridFn(P.grid, u1.values**2), order=4)
    return u1, alpha0
