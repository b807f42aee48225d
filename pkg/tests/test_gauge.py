import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

import oracles
from pencil_inverse.dirac import DiracPotential, dirac_spectral_data
from pencil_inverse.errors import DomainError, InconsistentAngleError, QuantizationError
from pencil_inverse.gauge import check_quantization, extract_pq, p_to_q, q_to_p, solve_theta
from pencil_inverse.grid import Grid, GridFn
from pencil_inverse.pencil import assemble_pencil_dirac, miura_field


def test_zero_potential():
    angle = solve_theta(DiracPotential.zero(Grid(64)))
    assert np.all(angle.theta.values == 0.0)
    assert angle.quantization_n == 0 and angle.quantization_residual == 0.0
    assert check_quantization(angle) == 0


def test_pi_identity():
    g = Grid(64)
    angle = solve_theta(DiracPotential.shifted_akns(g, 0.0, 0.0, math.pi))
    np.testing.assert_allclose(angle.theta.values, math.pi * g.nodes, atol=1e-14)
    assert check_quantization(angle) == 1
    assert angle.quantization_residual < 1e-14
    P = q_to_p(DiracPotential.shifted_akns(g, 0.0, 0.0, math.pi), angle)
    assert np.max(np.abs(P.p12)) < 1e-12 and np.max(np.abs(P.p22)) < 1e-12


def test_double_commuted_free_has_zero_angle():
    g = Grid(128)
    Q = DiracPotential.shifted_akns(g, 0.0, -1.0 / (1.0 + g.nodes), 0.0)
    angle = solve_theta(Q)
    assert np.all(angle.theta.values == 0.0)
    P = q_to_p(Q, angle)
    np.testing.assert_allclose(P.p12, -1.0 / (1.0 + g.nodes))
    assert np.all(P.p22 == 0.0)


def test_half_identity_violates_quantization():
    angle = solve_theta(DiracPotential.shifted_akns(Grid(64), 0.0, 0.0, 0.5))
    with pytest.raises(QuantizationError) as info:
        check_quantization(angle)
    assert info.value.n == 0
    assert info.value.residual == pytest.approx(0.5)


def test_angle_matches_oracle():
    g = Grid(1024)

    def q1(x):
        return 0.4 * np.cos(np.pi * x)

    def q2(x):
        return 0.3 - 0.5 * x

    angle = solve_theta(DiracPotential.shifted_akns(g, q1(g.nodes), q2(g.nodes), 0.7))
    ref = oracles.theta(q1, q2, 0.7, g.nodes)
    # midpoint values of q come from linear interpolation: second order overall
    assert np.max(np.abs(angle.theta.values - ref)) < 1e-6


def smooth_q(m=512, h=0.2):
    g = Grid(m)
    x = g.nodes
    return DiracPotential.shifted_akns(g, 0.3 * np.sin(np.pi * x), 0.2 * x - 0.1, h)


@given(st.floats(-2.0, 2.0))
def test_round_trip_q_p_q(h):
    Q = smooth_q(h=h)
    angle = solve_theta(Q)
    P = q_to_p(Q, angle)
    assert P.form == "pencil"
    back = p_to_q(P, angle)
    assert back.h == pytest.approx(Q.h, abs=1e-12)
    np.testing.assert_allclose(back.q1, Q.q1, atol=1e-12)
    np.testing.assert_allclose(back.q2, Q.q2, atol=1e-12)


def test_rotation_is_isospectral_when_quantized():
    Q = smooth_q(1024, h=0.0)

    def end_angle(h):
        return solve_theta(DiracPotential.shifted_akns(Q.grid, Q.q1, Q.q2, h)).theta.values[-1]

    # theta(1) is increasing in h; pick the h that puts it at 0
    Qs = DiracPotential.shifted_akns(Q.grid, Q.q1, Q.q2, brentq(end_angle, -2.0, 2.0, xtol=1e-14))
    angle = solve_theta(Qs)
    assert check_quantization(angle, 1e-10) == 0
    P = q_to_p(Qs, angle)
    n = angle.quantization_n
    a = dirac_spectral_data(Qs, 3)
    b = dirac_spectral_data(P, 0, indices=[e.n + n for e in a])
    for ea, eb in zip(a, b):
        assert eb.lam == pytest.approx(ea.lam, abs=1e-6)
        assert eb.alpha == pytest.approx(ea.alpha, abs=1e-5)


def test_wrong_angle_is_detected():
    Q = smooth_q()
    wrong = solve_theta(DiracPotential.shifted_akns(Q.grid, Q.q1, Q.q2 + 0.1, Q.h))
    with pytest.raises(InconsistentAngleError):
        q_to_p(Q, wrong)


def test_form_checks():
    g = Grid(16)
    pencil = DiracPotential.from_entries(g, 0.0, 0.1, 0.2, form="pencil")
    with pytest.raises(DomainError):
        solve_theta(pencil)
    with pytest.raises(DomainError):
        extract_pq(DiracPotential.zero(g))


def test_extract_pq_inverts_assembly():
    g = Grid(1024)
    p = GridFn.from_function(g, lambda x: 0.5 * np.cos(np.pi * x))
    r = GridFn.from_function(g, lambda x: 0.3 * np.sin(2 * np.pi * x))
    pot = extract_pq(assemble_pencil_dirac(p, miura_field(r)))
    np.testing.assert_allclose(pot.p.values, p.values, atol=1e-15)
    diff = pot.r.values - r.values
    # r is recovered up to an additive constant
    assert np.max(np.abs(diff - diff.mean())) < 1e-5
