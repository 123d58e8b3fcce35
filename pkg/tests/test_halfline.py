import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cylwave.airy import zero_table
from cylwave.errors import DomainError, TruncationError
from cylwave.halfline import (HalfLineGrid, eigenvalue, gram_matrix, mode_eval, mode_values,
                              project, required_x_max, synthesize)

TABLE = zero_table(20)


@pytest.mark.parametrize("eta", [0.5, 1.0, 2.0, -1.0])
def test_gram_matrix_is_identity(eta):
    grid = HalfLineGrid.for_modes(20, eta, table=TABLE)
    G = gram_matrix(20, eta, grid, TABLE)
    assert np.max(np.abs(G - np.eye(20))) < 1e-8


@pytest.mark.parametrize("eta", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("k", [1, 4, 20])
def test_finite_difference_eigen_residual(eta, k):
    h = 1e-3
    om = TABLE.omega[k - 1]
    x = np.arange(h, required_x_max(k, eta, TABLE), h)
    e = mode_values([k], eta, x, TABLE)[0]
    d2 = (e[2:] - 2 * e[1:-1] + e[:-2]) / h ** 2
    lam = eigenvalue(k, eta, 0.0, TABLE)
    # -e'' + (1 + x) eta^2 e = lambda e
    r = -d2 + (1 + x[1:-1]) * eta ** 2 * e[1:-1] - lam * e[1:-1]
    assert np.max(np.abs(r)) / (lam * np.max(np.abs(e))) < 1e-4


def test_dirichlet_condition_and_derivative():
    x = np.array([0.0, 0.3])
    e, de = mode_values(np.arange(1, 6), 1.5, x, TABLE, derivative=True)
    assert np.all(np.abs(e[:, 0]) < 1e-14)
    h = 1e-6
    fd = (mode_values(np.arange(1, 6), 1.5, x + h, TABLE) -
          mode_values(np.arange(1, 6), 1.5, x - h, TABLE))[:, 1] / (2 * h)
    assert np.allclose(de[:, 1], fd, atol=1e-6)


def test_eigenvalue_formula():
    lam = eigenvalue(np.array([1, 2]), 8.0, 3.0, TABLE)
    assert np.allclose(lam, 64 + 9 + TABLE.omega[:2] * 16.0)


def test_eta_zero_is_rejected():
    with pytest.raises(DomainError):
        mode_values([1], 0.0, np.array([0.1]), TABLE)
    with pytest.raises(DomainError):
        eigenvalue(1, 0.0, 0.0, TABLE)


def test_short_grid_raises_truncation():
    grid = HalfLineGrid.from_panels(2.0, 0.5)
    with pytest.raises(TruncationError):
        mode_eval(20, 0.5, grid, TABLE)


def test_mode_index_outside_table():
    grid = HalfLineGrid.for_modes(5, 1.0, table=TABLE)
    with pytest.raises(DomainError):
        mode_eval(0, 1.0, grid, TABLE)
    with pytest.raises(DomainError):
        mode_eval(21, 1.0, grid, TABLE)


def test_panels_integrate_polynomials_exactly():
    grid = HalfLineGrid.from_panels(3.0, 1.0, n_gauss=8)
    assert grid.integrate(grid.nodes ** 7) == pytest.approx(3.0 ** 8 / 8, rel=1e-14)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=0.3, max_value=4.0),
       st.lists(st.floats(min_value=-1, max_value=1), min_size=8, max_size=8))
def test_project_synthesize_round_trip(eta, coeffs):
    grid = HalfLineGrid.for_modes(8, eta, table=TABLE)
    c = np.array(coeffs)
    f = c @ mode_values(np.arange(1, 9), eta, grid.nodes, TABLE)
    back = project(f, eta, 0.0, 8, grid, TABLE)
    assert np.allclose(back.coeffs, c, atol=1e-9)
    assert np.allclose(synthesize(back, grid, TABLE), f, atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=0.2, max_value=5.0), st.integers(min_value=1, max_value=20))
def test_eigenfunctions_are_unit_and_positive_lambda(eta, k):
    grid = HalfLineGrid.for_modes(k, eta, table=TABLE)
    e = mode_eval(k, eta, grid, TABLE)
    assert grid.inner(e, e) == pytest.approx(1.0, abs=1e-9)
    assert eigenvalue(k, eta, 0.0, TABLE) > eta ** 2
