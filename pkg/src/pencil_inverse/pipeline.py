"""Forward and inverse pipelines plus the seeded synthetic-potential generator."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .dirac import DiracPotential, dirac_spectral_data, zero_mode
from .errors import DomainError, NotPositiveError
from .gauge import GaugeAngle, QUANT_TOL, check_quantization, extract_pq, q_to_p, solve_theta
from .gelfand_levitan import EPS_ALPHA, EPS_LAMBDA, refine, solve_gl
from .grid import DEFAULT_INTERVALS, MIN_INTERVALS, Grid, GridFn
from .pencil import PencilPotentials, assemble_pencil_dirac, check_positivity, miura_field
from .spectral import AugmentedSpectralData, SpectralData, ValidationTolerances, augment

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    m: int = DEFAULT_INTERVALS
    N: int = 32
    alpha0: float = 1.0
    tol_lambda: float = EPS_LAMBDA
    tol_alpha: float = EPS_ALPHA
    tol_quant: float = QUANT_TOL
    refine: bool = True
    refine_basis_size: int = 28
    refine_basis: str = "chebyshev"
    refine_extrapolate: bool = True
    seed: int = 0
    validation: ValidationTolerances = field(default_factory=ValidationTolerances)

    def __post_init__(self):
        if int(self.m) != self.m or self.m < MIN_INTERVALS:
            raise DomainError(f"m must be an integer >= {MIN_INTERVALS}")
        if int(self.N) != self.N or self.N < 2:
            raise DomainError("N must be an integer >= 2")
        if not self.alpha0 > 0.0:
            raise DomainError("alpha0 must be positive")

    @property
    def grid(self) -> Grid:
        return Grid(self.m)

    def to_dict(self) -> dict:
        return asdict(self)


def forward(pot: PencilPotentials, N: int) -> tuple:
    """Spectral data of the pencil for n = +-1..+-N and the Dirac potential used.

    The Dirac zero-mode norming constant is carried along as ``zero_alpha``.
    """
    if N < 1:
        raise DomainError("N must be positive")
    check_positivity(pot.r)
    P = assemble_pencil_dirac(pot.p, miura_field(pot.r))
    eigs = dirac_spectral_data(P, N)
    return SpectralData.from_eigenpairs(eigs), P


@dataclass(frozen=True, eq=False)
class InverseResult:
    potentials: PencilPotentials
    Q: DiracPotential
    P: DiracPotential
    angle: GaugeAngle
    augmented: AugmentedSpectralData
    report: dict


def spectral_mismatch(P: DiracPotential, sd: SpectralData, offset: int = 0) -> dict:
    """Re-run the direct solver on P and compare with ``sd`` (pairs n != 0)."""
    ns = sd.ns
    eigs = dirac_spectral_data(P, 0, indices=(ns + offset).tolist(),
                               guesses=dict(zip((ns + offset).tolist(), sd.lams.tolist())))
    dl = np.abs(np.array([e.lam for e in eigs]) - sd.lams)
    da = np.abs(np.array([e.alpha for e in eigs]) - sd.alphas)
    return {"max_dlambda": float(dl.max()), "max_dalpha": float(da.max())}


def inverse(sd: SpectralData, config: PipelineConfig = PipelineConfig()) -> InverseResult:
    """Reconstruct (p, r) from pencil spectral data.

    shift estimate -> augment with (0, alpha0) -> Gelfand-Levitan -> optional
    smooth refinement -> gauge angle -> quantization check -> pencil form -> (p, r).
    """
    grid = config.grid
    aug = augment(sd, config.alpha0, tolerances=config.validation)
    Q = solve_gl(aug, grid, eps_lambda=config.tol_lambda, eps_alpha=config.tol_alpha)
    if config.refine:
        Q = refine(Q, aug, config.refine_basis_size, basis=config.refine_basis,
                   extrapolate=config.refine_extrapolate)
    angle = solve_theta(Q)
    n = check_quantization(angle, config.tol_quant)
    P = q_to_p(Q, angle)
    pot = extract_pq(P)
    mismatch = spectral_mismatch(P, sd, offset=n)
    report = {
        "h_committed": aug.h,
        "h_final": Q.h,
        "quantization_n": n,
        "quantization_residual": angle.quantization_residual,
        "zero_mode_alpha": zero_mode(P)[1],
        "roundtrip": mismatch,
        "roundtrip_ok": mismatch["max_dlambda"] <= config.tol_lambda
        and mismatch["max_dalpha"] <= config.tol_alpha,
        "config": config.to_dict(),
    }
    log.info("inverse: h=%.6g n=%d roundtrip %s", Q.h, n, mismatch)
    return InverseResult(pot, Q, P, angle, aug, report)


def _fourier_series(rng: np.random.Generator, x: np.ndarray, terms: int) -> np.ndarray:
    k = np.arange(terms)
    a = rng.uniform(-1.0, 1.0, terms) / (1.0 + k) ** 2
    b = rng.uniform(-1.0, 1.0, terms) / (1.0 + k) ** 2
    return np.cos(np.pi * np.outer(x, k)) @ a + np.sin(np.pi * np.outer(x, k)) @ b


def synthetic_potentials(seed: int, grid: Optional[Grid] = None, terms: int = 4,
                         amplitude: float = 1.0, max_tries: int = 100) -> PencilPotentials:
    """Seeded smooth (p, r) with sup-norms at most ``amplitude`` and A > 0.

    p and r are truncated Fourier series sum_k a_k cos(k pi x) + b_k sin(k pi x)
    with coefficients uniform in [-1, 1] damped by (1 + k)^-2, rescaled to a sup
    norm drawn uniformly from [amplitude / 4, amplitude].  Draws whose operator
    A fails the positivity certificate are discarded.
    """
    grid = grid or Grid()
    rng = np.random.default_rng(seed)
    x = grid.nodes
    for _ in range(max_tries):
        p = _fourier_series(rng, x, terms)
        r = _fourier_series(rng, x, terms)
        p *= rng.uniform(0.25, 1.0) * amplitude / np.max(np.abs(p))
        r *= rng.uniform(0.25, 1.0) * amplitude / np.max(np.abs(r))
        pot = PencilPotentials(GridFn(grid, p), GridFn(grid, r))
        try:
            check_positivity(pot.r)
        except NotPositiveError:
            continue
        return pot
    raise NotPositiveError(f"no admissible potential in {max_tries} draws (seed {seed})")
