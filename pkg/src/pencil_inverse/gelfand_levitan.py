"""Shifted-AKNS Dirac potentials from augmented spectral data.

The transformation kernel K(x, y) solves the Gelfand-Levitan equation

    K(x, y) + Omega(x, y) + int_0^x K(x, t) Omega(t, y) dt = 0,   0 <= y <= x,

where Omega = sum_n [phi0(x, mu_n) phi0(y, mu_n)^T / alpha_n - phi0(x, pi n) phi0(y, pi n)^T],
``mu_n = lam_n - h`` and ``phi0(x, mu) = (cos mu x, sin mu x)``.  Truncated data
make Omega separable, Omega(x, y) = Phi(x) S Phi(y)^T, so every row of the
integral equation collapses to the L x L system

    (S^{-1} + M(x)) Z = Phi(x)^T,   M(x) = int_0^x Phi^T Phi,   K(x, x) = -Phi(x) Z,

with L the number of surviving terms.  Since phi0(t, a)^T phi0(t, b) = cos((a - b) t),
M(x) has closed-form entries; ``quadrature="trapezoid"`` instead uses the
node-based trapezoid (Nystrom) Gram matrix.  The AKNS entries follow from the
diagonal of the kernel: q1 = -(K12 + K21), q2 = K11 - K22.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dirac import DiracPotential, dirac_spectral_data
from .errors import ConventionError, DomainError, PencilError, ReconstructionError
from .grid import Grid, trapezoid_weights
from .spectral import AugmentedSpectralData

log = logging.getLogger(__name__)

COND_LIMIT = 1e12
EPS_LAMBDA = 1e-4
EPS_ALPHA = 1e-3
_CHUNK = 64
# refine stops once a step removes less than 20% of the squared residual
STALL_RATIO = 0.8


@dataclass(frozen=True, eq=False)
class GLSystem:
    """Separable Gelfand-Levitan kernel Omega(x, y) = sum_l s_l phi0(x, mu_l) phi0(y, mu_l)^T."""

    grid: Grid
    freqs: np.ndarray
    coefs: np.ndarray
    N: int
    h: float

    @property
    def rank(self) -> int:
        return len(self.freqs)

    def phi(self, x) -> np.ndarray:
        """Phi(x) with shape (len(x), 2, L)."""
        t = np.outer(np.atleast_1d(x), self.freqs)
        return np.stack([np.cos(t), np.sin(t)], axis=1)

    def omega(self, x, y) -> np.ndarray:
        """Omega at the point pairs (x_i, y_i); shape (len, 2, 2)."""
        px, py = self.phi(x), self.phi(y)
        return np.einsum("iak,k,ibk->iab", px, self.coefs, py)

    def omega_on_grid(self) -> np.ndarray:
        """Dense Omega on all node pairs, shape (m+1, m+1, 2, 2); memory heavy."""
        p = self.phi(self.grid.nodes)
        return np.einsum("iak,k,jbk->ijab", p, self.coefs, p)


def build_gl_kernel(aug: AugmentedSpectralData, grid: Grid, drop_tol: float = 1e-14) -> GLSystem:
    """Collect the separable terms of Omega; exactly cancelling pairs are dropped."""
    freqs, coefs = [], []
    for pair in aug.pairs:
        mu = pair.lam - aug.h
        mu0 = math.pi * pair.n
        if abs(mu - mu0) <= drop_tol * max(1.0, abs(mu0)) and abs(1.0 / pair.alpha - 1.0) <= drop_tol:
            continue
        freqs += [mu, mu0]
        coefs += [1.0 / pair.alpha, -1.0]
    return GLSystem(grid, np.array(freqs, dtype=float), np.array(coefs, dtype=float), aug.N, aug.h)


def _gram_exact(freqs: np.ndarray, x: np.ndarray) -> np.ndarray:
    d = freqs[:, None] - freqs[None, :]
    return x[:, None, None] * np.sinc(d[None, :, :] * x[:, None, None] / math.pi)


def _gram_trapezoid(freqs: np.ndarray, grid: Grid) -> np.ndarray:
    """Cumulative trapezoid Gram matrices at every node, shape (m+1, L, L)."""
    x = grid.nodes
    d = freqs[:, None] - freqs[None, :]
    out = np.empty((len(x), len(freqs), len(freqs)))
    out[0] = 0.0
    prev = np.ones_like(d)
    acc = np.zeros_like(d)
    for j in range(1, len(x)):
        cur = np.cos(d * x[j])
        acc += 0.5 * grid.step * (prev + cur)
        out[j] = acc
        prev = cur
    return out


def kernel_diagonal(system: GLSystem, quadrature: str = "exact"):
    """K(x_j, x_j) at every node and a condition estimate of the row systems."""
    grid = system.grid
    x = grid.nodes
    L = system.rank
    diag = np.zeros((len(x), 2, 2))
    if L == 0:
        return diag, 1.0
    if quadrature not in ("exact", "trapezoid"):
        raise DomainError(f"unknown quadrature {quadrature!r}")
    sinv = np.diag(1.0 / system.coefs)
    gram_all = _gram_trapezoid(system.freqs, grid) if quadrature == "trapezoid" else None
    cond = 1.0
    probe = set(range(0, len(x), 32)) | {len(x) - 1}
    for start in range(0, len(x), _CHUNK):
        sl = slice(start, min(start + _CHUNK, len(x)))
        xs = x[sl]
        gram = gram_all[sl] if gram_all is not None else _gram_exact(system.freqs, xs)
        A = sinv[None] + gram
        phi = system.phi(xs)  # (c, 2, L)
        try:
            Z = np.linalg.solve(A, np.transpose(phi, (0, 2, 1)))
        except np.linalg.LinAlgError as exc:
            raise ReconstructionError(f"singular Gelfand-Levitan system near x={xs[0]:.4f}") from exc
        diag[sl] = -phi @ Z
        for j in range(sl.start, sl.stop):
            if j in probe:
                cond = max(cond, float(np.linalg.cond(A[j - sl.start])))
    return diag, cond


def _potential_from_diagonal(grid: Grid, diag: np.ndarray, h: float) -> DiracPotential:
    q1 = -(diag[:, 0, 1] + diag[:, 1, 0])
    q2 = diag[:, 0, 0] - diag[:, 1, 1]
    return DiracPotential.shifted_akns(grid, q1, q2, h)


def compare_spectral_data(Q: DiracPotential, aug: AugmentedSpectralData, offset: int = 0) -> dict:
    """Largest eigenvalue and norming-constant mismatch of Q against ``aug``."""
    ns = aug.ns
    eigs = dirac_spectral_data(Q, 0, indices=(ns + offset).tolist())
    dl = np.array([e.lam for e in eigs]) - aug.lams
    da = np.array([e.alpha for e in eigs]) - aug.alphas
    return {
        "max_dlambda": float(np.max(np.abs(dl))),
        "max_dalpha": float(np.max(np.abs(da))),
        "worst_lambda_n": int(ns[np.argmax(np.abs(dl))]),
        "worst_alpha_n": int(ns[np.argmax(np.abs(da))]),
    }


def solve_gl(aug: AugmentedSpectralData, grid: Grid, quadrature: str = "exact",
             check: bool = True, eps_lambda: float = EPS_LAMBDA,
             eps_alpha: float = EPS_ALPHA) -> DiracPotential:
    """The shifted-AKNS potential Q = Q0 + hI whose spectral data are ``aug``.

    With ``check`` the result is pushed back through the direct solver and a
    mismatch beyond (eps_lambda, eps_alpha) raises :class:`ConventionError`.
    """
    system = build_gl_kernel(aug, grid)
    diag, cond = kernel_diagonal(system, quadrature)
    if not np.all(np.isfinite(diag)):
        raise ReconstructionError("non-finite Gelfand-Levitan solution")
    if cond > COND_LIMIT:
        raise ReconstructionError(f"Gelfand-Levitan system ill-conditioned (cond ~ {cond:.3g})")
    Q = _potential_from_diagonal(grid, diag, aug.h)
    if check:
        try:
            diag_info = compare_spectral_data(Q, aug)
        except PencilError as exc:
            raise ConventionError(f"reconstructed potential failed the forward check: {exc}") from exc
        if diag_info["max_dlambda"] > eps_lambda or diag_info["max_dalpha"] > eps_alpha:
            raise ConventionError(
                "reconstructed potential does not reproduce its data "
                f"(max |dlambda|={diag_info['max_dlambda']:.3g}, max |dalpha|={diag_info['max_dalpha']:.3g})",
                diag_info,
            )
    return Q


BASES = ("chebyshev", "cosine")


def refine_basis(grid: Grid, size: int, kind: str = "chebyshev") -> np.ndarray:
    """Basis functions sampled on the grid, shape (size, m+1).

    ``chebyshev``: T_k(2x - 1); ``cosine``: cos(k pi x), k = 0..size-1.
    """
    x = grid.nodes
    if kind == "chebyshev":
        return np.polynomial.chebyshev.chebvander(2.0 * x - 1.0, size - 1).T
    if kind == "cosine":
        return np.cos(np.pi * np.outer(np.arange(size), x))
    raise DomainError(f"unknown refine basis {kind!r}; expected one of {BASES}")


def _residual_vector(Q: DiracPotential, aug: AugmentedSpectralData, guesses=None) -> np.ndarray:
    eigs = dirac_spectral_data(Q, 0, indices=aug.ns.tolist(), guesses=guesses)
    return np.concatenate([np.array([e.lam for e in eigs]) - aug.lams,
                           np.array([e.alpha for e in eigs]) - aug.alphas])


def _project(basis: np.ndarray, weights: np.ndarray, f: np.ndarray) -> np.ndarray:
    sw = np.sqrt(weights)
    coef, *_ = np.linalg.lstsq((basis * sw).T, f * sw, rcond=None)
    return coef


def refine(Q: DiracPotential, aug: AugmentedSpectralData, basis_size: int,
           basis: str = "chebyshev", fit_shift: bool = True, max_iter: int = 8,
           fd_step: float = 1e-6, tol: float = 1e-12, c1: float = 1e-4,
           min_step: float = 1.0 / 64, extrapolate: bool = True) -> DiracPotential:
    """Gauss-Newton least-squares fit of (q1, q2) in a smooth basis.

    Minimises sum_n (lam_n(Q) - lam_n)^2 + (alpha_n(Q) - alpha_n)^2 over the
    basis coefficients of q1 and q2 (and over the shift h when ``fit_shift``),
    starting from the weighted L2 projection of ``Q``.  Truncated data leave the
    Gelfand-Levitan solution with boundary layers that no smooth potential
    has; restricting the fit to a smooth class removes them.  The Jacobian
    is formed by forward differences and reused while the steps keep
    halving the residual (chord iteration).

    With ``extrapolate`` the residual is evaluated on the grid and on its
    refinement and combined as (4 r_2m - r_m) / 3.  The direct solver is
    second order, so without it the fit absorbs the O(h^2) bias of the
    forward map into the potential.  The basis makes the candidate
    potential available on the finer grid without interpolation.

    The result never has a larger residual than ``Q``; if no improvement is
    found the input is returned with a warning.
    """
    if basis_size <= 0:
        return Q
    if Q.form != "shifted-akns":
        raise DomainError("refine expects a shifted-AKNS potential")
    grid = Q.grid
    B = refine_basis(grid, basis_size, basis)
    K = basis_size

    res_in = _residual_vector(Q, aug)
    f_in = float(res_in @ res_in)
    if math.sqrt(f_in) <= tol:
        return Q
    guesses = dict(zip(aug.ns.tolist(), aug.lams.tolist()))

    fine = grid.refine()
    B_fine = refine_basis(fine, basis_size, basis) if extrapolate else None

    def build(c, on=grid, basis_vals=B):
        h = c[-1] if fit_shift else Q.h
        return DiracPotential.shifted_akns(on, c[:K] @ basis_vals, c[K:2 * K] @ basis_vals, h)

    def residual(c):
        try:
            res = _residual_vector(build(c), aug, guesses)
            if extrapolate:
                res = (4.0 * _residual_vector(build(c, fine, B_fine), aug, guesses) - res) / 3.0
        except PencilError:
            return None
        return res

    w = trapezoid_weights(grid)
    c = np.concatenate([_project(B, w, Q.q1), _project(B, w, Q.q2), [Q.h] if fit_shift else []])
    res = residual(c)
    if res is None:
        warnings.warn("refine: projected start is not admissible; returning input", RuntimeWarning)
        return Q
    f = float(res @ res)

    def jacobian(c, res):
        jac = np.empty((len(res), len(c)))
        for k in range(len(c)):
            ck = c.copy()
            ck[k] += fd_step
            rk = residual(ck)
            if rk is None:
                raise ReconstructionError("refine: finite-difference probe left the admissible set")
            jac[:, k] = (rk - res) / fd_step
        return jac

    jac = jacobian(c, res)
    fresh = True
    for _ in range(max_iter):
        if math.sqrt(f) <= tol:
            break
        step, *_ = np.linalg.lstsq(jac, -res, rcond=None)
        slope = 2.0 * float(res @ (jac @ step))
        t, accepted = 1.0, False
        while t >= min_step:
            trial = residual(c + t * step)
            if trial is not None:
                f_trial = float(trial @ trial)
                if f_trial <= f + c1 * t * slope:
                    accepted = True
                    break
            t *= 0.5
        if not accepted:
            if fresh:
                break
            jac, fresh = jacobian(c, res), True
            continue
        c = c + t * step
        ratio = f_trial / f
        res, f = trial, f_trial
        log.debug("refine: residual %.3g (step %.3g)", math.sqrt(f), t)
        if ratio > STALL_RATIO:
            break
        if ratio > 0.25 and not fresh:
            jac, fresh = jacobian(c, res), True
        else:
            fresh = False
    if not f < f_in:
        warnings.warn("refine: could not decrease the residual; returning input", RuntimeWarning)
        return Q
    return build(c)
