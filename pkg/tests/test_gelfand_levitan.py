import math
import warnings

import numpy as np
import pytest

import oracles
from pencil_inverse.dirac import DiracPotential
from pencil_inverse.errors import ConventionError, DomainError
from pencil_inverse.gelfand_levitan import (
    _residual_vector,
    build_gl_kernel,
    compare_spectral_data,
    kernel_diagonal,
    refine,
    refine_basis,
    solve_gl,
)
from pencil_inverse.grid import Grid, GridFn, l2_norm
from pencil_inverse.pencil import PencilPotentials
from pencil_inverse.pipeline import forward
from pencil_inverse.spectral import SpectralData, augment


def free_data(N=8, h=0.0):
    ns = [n for n in range(-N, N + 1) if n]
    return SpectralData.from_arrays(ns, math.pi * np.array(ns) + h, np.ones(len(ns)), h=h)


def pencil_data(m=256, N=8):
    """Augmented data of a smooth pencil; the zero pair is the pencil's own zero mode."""
    g = Grid(m)
    pot = PencilPotentials(GridFn.from_function(g, lambda x: 0.3 * np.cos(np.pi * x)),
                           GridFn.from_function(g, lambda x: 0.2 * np.sin(np.pi * x)))
    sd, _ = forward(pot, N)
    return augment(sd, sd.zero_alpha)


def test_free_data_give_zero_kernel():
    aug = augment(free_data(), 1.0)
    system = build_gl_kernel(aug, Grid(64))
    assert system.rank == 0
    diag, cond = kernel_diagonal(system)
    assert np.all(diag == 0.0) and cond == 1.0
    Q = solve_gl(aug, Grid(64))
    assert np.all(Q.q1 == 0.0) and np.all(Q.q2 == 0.0)


def test_kernel_terms():
    aug = augment(free_data(2), 0.5)
    system = build_gl_kernel(aug, Grid(16))
    # only the n = 0 pair survives: Omega = (1/alpha0 - 1) e1 e1^T
    assert system.rank == 2
    om = system.omega([0.3], [0.7])[0]
    np.testing.assert_allclose(om, [[1.0, 0.0], [0.0, 0.0]], atol=1e-15)


@pytest.mark.parametrize("alpha0", [0.5, 2.0, 0.8])
def test_double_commuted_free_closed_form(alpha0):
    g = Grid(256)
    Q = solve_gl(augment(free_data(), alpha0), g)
    a_star = 1 / alpha0 - 1
    np.testing.assert_allclose(Q.q2, oracles.double_commuted_free(g.nodes, a_star), atol=1e-12)
    assert np.max(np.abs(Q.q1)) < 1e-12


@pytest.mark.parametrize("quadrature", ["exact", "trapezoid"])
def test_reproduces_exact_truncated_data(quadrature):
    g = Grid(512)
    Q = solve_gl(augment(free_data(), 0.5), g, quadrature=quadrature)
    info = compare_spectral_data(Q, augment(free_data(), 0.5))
    assert info["max_dlambda"] < 1e-5 and info["max_dalpha"] < 1e-4


def test_reconstructs_pencil_data():
    aug = pencil_data()
    Q = solve_gl(aug, Grid(256))
    info = compare_spectral_data(Q, aug)
    assert info["max_dlambda"] < 1e-4 and info["max_dalpha"] < 1e-3


def test_convention_error_on_tight_tolerance():
    with pytest.raises(ConventionError) as info:
        solve_gl(pencil_data(), Grid(256), eps_lambda=1e-14, eps_alpha=1e-14)
    assert "max_dlambda" in info.value.diagnostics


def test_refine_basis_shapes():
    B = refine_basis(Grid(16), 5)
    assert B.shape == (5, 17)
    np.testing.assert_allclose(B[0], 1.0)
    np.testing.assert_allclose(B[1], 2 * Grid(16).nodes - 1)
    assert refine_basis(Grid(16), 3, "cosine")[2, -1] == pytest.approx(1.0)
    with pytest.raises(DomainError):
        refine_basis(Grid(16), 3, "legendre")


def test_refine_identity_cases():
    g = Grid(128)
    aug = augment(free_data(), 1.0)
    Q = solve_gl(aug, g)
    assert refine(Q, aug, 0) is Q
    assert refine(Q, aug, 8) is Q  # zero residual already
    P = DiracPotential.from_entries(g, 0.0, 0.0, 0.0, form="pencil")
    with pytest.raises(DomainError):
        refine(P, aug, 8)


def test_refine_reduces_perturbation():
    aug = pencil_data()
    g = Grid(256)
    x = g.nodes
    Q = refine(solve_gl(aug, g), aug, 12)
    Qp = DiracPotential.shifted_akns(g, Q.q1 + 1e-2 * np.cos(2 * np.pi * x), Q.q2, Q.h)
    before = np.linalg.norm(_residual_vector(Qp, aug))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        Qr = refine(Qp, aug, 12)
    after = np.linalg.norm(_residual_vector(Qr, aug))
    assert after <= before / 10
    assert l2_norm(GridFn(g, Qr.q1 - Q.q1)) < 0.1 * l2_norm(GridFn(g, Qp.q1 - Q.q1))
