"""Energy-dependent Sturm-Liouville pencils and their Dirac reduction.

The pencil is ``-y'' + q y + 2 lam p y = lam^2 y`` with ``y(0) = y(1) = 0``,
where ``q = r'`` may be a distribution.  Nothing here differentiates ``r``:
solutions are carried together with the quasi-derivative ``y[1] = y' - r y``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .dirac import DiracPotential
from .errors import DomainError, IntegrationError, NotPositiveError
from .grid import Grid, GridFn, integrate, same_grid

SWEEP_EXPONENTS = range(-20, 21)
POSITIVITY_MARGIN = 1e-3
ZERO_R_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PencilPotentials:
    """The pair (p, r) with q = r' understood distributionally."""

    p: GridFn
    r: GridFn

    def __post_init__(self):
        same_grid(self.p, self.r)

    @property
    def grid(self) -> Grid:
        return self.p.grid

    @classmethod
    def from_arrays(cls, p, r) -> "PencilPotentials":
        p = np.asarray(p, dtype=float)
        grid = Grid(len(p) - 1)
        return cls(GridFn(grid, p), GridFn(grid, r))

    def to_dict(self) -> dict:
        return {"m": self.grid.m, "p": self.p.values.tolist(), "r": self.r.values.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "PencilPotentials":
        m = int(data["m"])
        if len(data["p"]) != m + 1 or len(data["r"]) != m + 1:
            raise DomainError(f"'p' and 'r' need m+1={m + 1} samples")
        jumps = data.get("r_jumps", [])
        for x in jumps:
            if abs(x * m - round(x * m)) > 1e-9:
                raise DomainError(f"jump of r at x={x} is not on a grid node (m={m})")
        grid = Grid(m)
        return cls(GridFn(grid, data["p"]), GridFn(grid, data["r"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True, eq=False)
class MiuraField:
    """Solution v of v' + v^2 = r' together with the primitive r it came from."""

    v: GridFn
    r: GridFn
    h: Optional[float] = None


@dataclass(frozen=True)
class PositivityCertificate:
    h: float
    ymin: float


def quasi_ivp(r: GridFn, y0: float, yq0: float):
    """Solve l(y) = 0 as the first-order system for (y, y[1]).

    ``y' = y[1] + r y`` and ``y[1]' = -r y[1] - r^2 y``.
    """
    r1, r2 = _kernels.gauss_samples(r.values)
    one = np.ones_like(r1)
    y, yq, bad = _kernels.propagate(r1, r2, one, one, -r1 * r1, -r2 * r2, r.grid.step, float(y0), float(yq0))
    if bad >= 0:
        raise IntegrationError(f"quasi-derivative IVP overflowed at node {bad}", node=bad)
    return GridFn(r.grid, y), GridFn(r.grid, yq)


def pencil_ivp(p: GridFn, r: GridFn, lam: float, y0: float = 0.0, yq0: Optional[float] = None):
    """Solve -y'' + q y + 2 lam p y = lam^2 y with y(0) = y0, y[1](0) = yq0 (default lam).

    As a first-order system: ``y' = y[1] + r y``,
    ``y[1]' = -r y[1] + (2 lam p - lam^2 - r^2) y``.
    """
    same_grid(p, r)
    yq0 = lam if yq0 is None else yq0
    r1, r2 = _kernels.gauss_samples(r.values)
    p1, p2 = _kernels.gauss_samples(p.values)
    one = np.ones_like(r1)
    c1 = 2.0 * lam * p1 - lam * lam - r1 * r1
    c2 = 2.0 * lam * p2 - lam * lam - r2 * r2
    y, yq, bad = _kernels.propagate(r1, r2, one, one, c1, c2, r.grid.step, float(y0), float(yq0))
    if bad >= 0:
        raise IntegrationError(f"pencil IVP overflowed at node {bad} (lambda={lam})", node=bad)
    return GridFn(r.grid, y), GridFn(r.grid, yq)


def _sweep(r: GridFn):
    """Admissible shooting offsets as (h, ymin, ||v||_2, y, yq)."""
    found = []
    for k in SWEEP_EXPONENTS:
        h = 2.0**k
        try:
            y, yq = quasi_ivp(r, h, 1.0)
        except IntegrationError:
            continue
        ymin, ymax = float(y.values.min()), float(y.values.max())
        if ymin <= 0.0 or ymin < POSITIVITY_MARGIN * ymax:
            continue
        v = yq.values / y.values + r.values
        found.append((h, ymin, integrate(GridFn(r.grid, v * v)), y, yq))
    return found


def _canonical(r: GridFn):
    found = _sweep(r)
    if not found:
        raise NotPositiveError(
            "A not positive: no solution of l(y)=0 with y(0)=h, y[1](0)=1 stays positive "
            f"for h in 2^{SWEEP_EXPONENTS[0]}..2^{SWEEP_EXPONENTS[-1]}"
        )
    # smallest ||v||_2 first, ties broken by the smaller offset
    return min(found, key=lambda t: (t[2], t[0]))


def check_positivity(r: GridFn) -> PositivityCertificate:
    """Certify assumption (A) by exhibiting a positive solution of l(y) = 0."""
    h, ymin, _, _, _ = _canonical(r)
    return PositivityCertificate(h, ymin)


def miura_field(r: GridFn) -> MiuraField:
    """Canonical v with v' + v^2 = q, v = y'/y for the certified positive y."""
    if np.max(np.abs(r.values)) <= ZERO_R_TOL:
        return MiuraField(GridFn.constant(r.grid, 0.0), r, None)
    h, _, _, y, yq = _canonical(r)
    return MiuraField(GridFn(r.grid, yq.values / y.values + r.values), r, h)


def assemble_pencil_dirac(p: GridFn, v: MiuraField) -> DiracPotential:
    """The pencil-form Dirac potential [[0, -v], [-v, 2p]]."""
    same_grid(p, v.v)
    return DiracPotential.pencil(p, v.v)


def pencil_alpha(p: GridFn, lam: float, y: GridFn) -> float:
    """Norming constant ``2 int y^2 - (2/lam) int p y^2``.

    ``y`` must be the eigenfunction with y(0) = 0, y[1](0) = lam.
    """
    if lam == 0.0:
        raise DomainError("norming constant undefined at lambda = 0")
    same_grid(p, y)
    y2 = y.values**2
    return 2.0 * integrate(GridFn(y.grid, y2), order=4) - 2.0 / lam * integrate(GridFn(y.grid, p.values * y2), order=4)
