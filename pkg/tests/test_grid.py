import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pencil_inverse.errors import DomainError, GridMismatchError
from pencil_inverse.grid import (
    Grid,
    GridFn,
    MatrixGridFn,
    antiderivative,
    cubic_samples,
    integrate,
    interpolate,
    l2_norm,
    resample,
    same_grid,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
sizes = st.integers(16, 200)


@st.composite
def grid_fns(draw, m=None):
    m = draw(sizes) if m is None else m
    return GridFn(Grid(m), draw(arrays(float, m + 1, elements=finite)))


def test_grid_nodes():
    g = Grid(16)
    assert g.nodes[0] == 0.0 and g.nodes[-1] == 1.0
    assert np.all(np.diff(g.nodes) > 0)
    assert g.step == 1 / 16
    assert g.refine().m == 32


@pytest.mark.parametrize("m", [0, 1, 15, 16.5, -4])
def test_grid_rejects_small_or_fractional(m):
    with pytest.raises(DomainError):
        Grid(m)


def test_gridfn_checks_length_and_finiteness():
    with pytest.raises(GridMismatchError):
        GridFn(Grid(16), np.zeros(16))
    with pytest.raises(DomainError):
        GridFn(Grid(16), np.r_[np.zeros(16), np.nan])


def test_gridfn_values_are_read_only():
    f = GridFn.constant(Grid(16), 1.0)
    with pytest.raises(ValueError):
        f.values[0] = 2.0


def test_integrate_examples():
    assert integrate(GridFn.constant(Grid(16), 1.0)) == pytest.approx(1.0, abs=1e-15)
    assert integrate(GridFn.from_function(Grid(64), lambda x: x)) == pytest.approx(0.5, abs=1e-15)
    s2 = integrate(GridFn.from_function(Grid(256), lambda x: np.sin(np.pi * x) ** 2))
    assert abs(s2 - 0.5) < 1e-6


def test_antiderivative_examples():
    g = Grid(256)
    F = antiderivative(GridFn.constant(g, 2.0))
    np.testing.assert_allclose(F.values, 2 * g.nodes, atol=1e-14)
    assert abs(antiderivative(GridFn.from_function(g, lambda x: np.cos(np.pi * x))).values[-1]) < 1e-6
    assert np.all(antiderivative(GridFn.constant(g, 0.0)).values == 0.0)


def test_interpolate_examples():
    # linear data are reproduced exactly on the minimal grid
    g = Grid(16)
    f = GridFn.from_function(g, lambda x: x)
    assert interpolate(f, 0.5) == pytest.approx(0.5, abs=1e-15)
    sq = GridFn.from_function(Grid(128), lambda x: x * x)
    assert abs(interpolate(sq, 0.3) - 0.09) < 1e-4
    with pytest.raises(DomainError):
        interpolate(f, 1.5)


@given(grid_fns())
def test_interpolate_exact_at_nodes(f):
    for j in (0, f.grid.m // 3, f.grid.m):
        assert interpolate(f, f.grid.nodes[j]) == f.values[j]


@given(grid_fns())
def test_integrate_matches_antiderivative_endpoint(f):
    assert integrate(f) == antiderivative(f).values[-1]


@given(st.data(), sizes, finite, finite)
def test_integrate_is_linear(data, m, a, b):
    f = data.draw(grid_fns(m))
    g = data.draw(grid_fns(m))
    lhs = integrate(GridFn(f.grid, a * f.values + b * g.values))
    rhs = a * integrate(f) + b * integrate(g)
    scale = 1.0 + abs(a) * np.abs(f.values).max() + abs(b) * np.abs(g.values).max()
    assert abs(lhs - rhs) <= 1e-12 * scale


@given(st.floats(0.5, 6.0), st.floats(-3, 3), st.sampled_from([32, 64, 128, 256]))
def test_refinement_error_is_second_order(freq, phase, m):
    def f(x):
        return np.cos(freq * x + phase)

    exact = (math.sin(freq + phase) - math.sin(phase)) / freq
    err = integrate(GridFn.from_function(Grid(m), f)) - exact
    # Euler-Maclaurin: err = h^2/12 (f'(1) - f'(0)) + O(h^4 freq^3)
    dfd = -freq * (math.sin(freq + phase) - math.sin(phase))
    h = 1.0 / m
    assert abs(err - h * h / 12 * dfd) <= 1.1 * h**4 * 2 * freq**3 / 720 + 1e-15


def test_json_round_trip():
    f = GridFn.from_function(Grid(32), lambda x: np.exp(x) / 3)
    g = GridFn.from_json(f.to_json())
    assert g.grid == f.grid and np.array_equal(g.values, f.values)
    with pytest.raises(GridMismatchError):
        GridFn.from_dict({"m": 16, "values": [0.0] * 5})


def test_same_grid_and_matrix():
    a = GridFn.constant(Grid(16), 1.0)
    b = GridFn.constant(Grid(32), 1.0)
    with pytest.raises(GridMismatchError):
        same_grid(a, b)
    M = MatrixGridFn.symmetric(a, GridFn.constant(Grid(16), 2.0), a)
    assert M.is_symmetric()
    np.testing.assert_array_equal(MatrixGridFn.from_array(M.grid, M.as_array()).as_array(), M.as_array())
    assert np.all(M.trace().values == 2.0)


def test_l2_norm_and_resample():
    g = Grid(512)
    f = GridFn.from_function(g, lambda x: np.sin(np.pi * x))
    assert l2_norm(f) == pytest.approx(math.sqrt(0.5), abs=1e-5)
    coarse = resample(f, Grid(16))
    np.testing.assert_allclose(coarse.values, np.sin(np.pi * Grid(16).nodes), atol=1e-14)


def test_order4_rejects_other_orders():
    with pytest.raises(DomainError):
        integrate(GridFn.constant(Grid(16), 1.0), order=3)


@given(st.floats(0.5, 6.0), st.floats(-3, 3))
def test_order4_quadrature_converges_at_fourth_order(freq, phase):
    def f(x):
        return np.cos(freq * x + phase)

    def F(x):
        return np.sin(freq * x + phase) / freq

    errs = []
    for m in (64, 128):
        g = Grid(m)
        got = antiderivative(GridFn.from_function(g, f), order=4).values
        errs.append(np.max(np.abs(got - (F(g.nodes) - F(0.0)))))
    # error constant grows like freq^4; the ratio of the two errors is ~16
    assert errs[0] <= 2e-2 * freq**4 / 64**4
    assert errs[1] <= errs[0] / 8 + 1e-15


def test_cubic_samples_reproduce_cubics():
    g = Grid(16)
    values = g.nodes**3 - 2 * g.nodes
    for t in (0.0, 0.21, 0.5, 1.0):
        x = g.nodes[:-1] + t * g.step
        np.testing.assert_allclose(cubic_samples(values, t), x**3 - 2 * x, atol=1e-14)
    np.testing.assert_allclose(integrate(GridFn(g, values), order=4), 0.25 - 1.0, atol=1e-15)
