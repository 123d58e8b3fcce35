import math
import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from cylwave.errors import (ConfigurationError, DomainError, ResolutionWarning, StepSizeError,
                            UnderResolvedError)
from cylwave.field import SpectralField, dirichlet_form_quadrature, sobolev_norm
from cylwave.nlw import (ConeProbe, ConeSpec, Nonlinearity, Trajectory, diagnostics_csv,
                         diagnostics_rows, dilate, energy, evolve, fitted_morawetz_constant,
                         flux_balance, last_resolvable, morawetz_check, nonconcentration_profile,
                         normal_derivative_norm, picard_solve, quintic_difference_check,
                         resolution_length, smooth_data)
from cylwave.propagator import WaveState, frequencies, propagate, trajectory


@pytest.fixture(scope="module")
def data(small_grid):
    return smooth_data(small_grid, seed=1, amplitude=1.0)


@pytest.fixture(scope="module")
def linear_traj(data):
    return Trajectory(trajectory(data, np.linspace(0.0, 3.0, 61)))


def mms_forcing(c, omega):
    """External forcing making u* = c cos(omega t) an exact solution of the
    semi-discrete equation (uses the solver's own projection of u*^5)."""
    g = c.grid
    mu2 = frequencies(g) ** 2
    nl = Nonlinearity(g)

    def f(t):
        u = c * math.cos(omega * t)
        lin = SpectralField(g, (mu2 - omega ** 2) * c.c * math.cos(omega * t))
        return lin - nl(u)
    return f


# -- energy and the nonlinear term --------------------------------------------

def test_energy_of_zero_and_single_mode(small_grid):
    z = SpectralField.zeros(small_grid)
    assert energy(WaveState(z, z)) == 0.0
    c = np.zeros(small_grid.shape, complex)
    c[0, 1, 0] = c[0, -1, 0] = 1e-3
    u = SpectralField(small_grid, c)
    lam = small_grid.lam[0, 1, 0]
    assert energy(WaveState(u, z)) == pytest.approx(lam * 1e-6, rel=1e-6)


def test_potential_is_nonnegative_for_defocusing(data):
    nl = Nonlinearity(data.grid)
    assert nl.potential(data.u) > 0
    assert Nonlinearity(data.grid, focusing=True).potential(data.u) == pytest.approx(
        -nl.potential(data.u))
    assert nl.l6(data.u) == pytest.approx((6 * nl.potential(data.u)) ** (1 / 6))


def test_smooth_data_size(small_grid):
    s = smooth_data(small_grid, seed=3, amplitude=2.5)
    assert sobolev_norm(s.u, 1.0) + s.v.l2() == pytest.approx(2.5)


# -- Picard -----------------------------------------------------------------

def test_picard_zero_data_is_immediate(small_grid):
    z = SpectralField.zeros(small_grid)
    traj, rep = picard_solve(z, z, 0.5, n_t=16)
    assert rep.iterates == 1 and rep.converged and rep.final_XT_norm == 0


def test_picard_small_data_contracts(small_grid):
    s = smooth_data(small_grid, seed=2, amplitude=1e-2)
    traj, rep = picard_solve(s.u, s.v, 0.5, n_t=64)
    assert rep.converged
    assert rep.contraction_factors and max(rep.contraction_factors) < 0.5


def test_picard_manufactured_solution(small_grid):
    c = smooth_data(small_grid, seed=4, amplitude=1.0).u
    omega, T = 1.3, 0.5
    traj, rep = picard_solve(c, SpectralField.zeros(small_grid), T, n_t=128,
                             forcing=mms_forcing(c, omega))
    exact = c * math.cos(omega * T)
    assert (traj[-1].u - exact).l2() < 1e-4 * c.l2()


def test_picard_agrees_with_evolve(small_grid):
    s = smooth_data(small_grid, seed=5, amplitude=20.0)     # quintic term ~ 1e-3 of u
    T = 0.25
    a, _ = picard_solve(s.u, s.v, T, n_t=250)
    b = evolve(s.u, s.v, T, 1e-3)
    assert (a[-1].u - b[-1].u).l2() < 1e-4 * b[-1].u.l2()


# -- evolve -----------------------------------------------------------------

def test_linear_evolve_is_exact_flow(data):
    tr = evolve(data.u, data.v, 0.5, 0.01, linear=True, save_every=10)
    ref = propagate(data, 0.5)
    assert (tr[-1].u - ref.u).l2() < 1e-12 * data.u.l2()
    assert len(tr) == 6


def test_evolve_conserves_energy(small_grid):
    s = smooth_data(small_grid, seed=0, amplitude=20.0)
    tr = evolve(s.u, s.v, 0.2, 2e-3, save_every=100)
    E = [energy(x) for x in tr.states]
    assert abs(E[-1] / E[0] - 1) < 1e-6


def test_evolve_argument_checks(data):
    with pytest.raises(StepSizeError):
        evolve(data.u, data.v, 1.0, 0.1)
    with pytest.raises(ConfigurationError):
        evolve(data.u, data.v, 0.1, 0.01, focusing=True)
    with pytest.raises(ConfigurationError):
        evolve(data.u, data.v, 0.1, 0.01, save_every=3)
    with pytest.raises(ConfigurationError):
        evolve(data.u, data.v, 0.105, 0.01)


# -- dilation ---------------------------------------------------------------

def test_dilation_identity(data):
    d = dilate(data, 1.0)
    assert (d.u - data.u).l2() < 1e-12 * data.u.l2()


def test_dilation_invariance(data):
    lam = 2.0
    d = dilate(data, lam)
    assert dirichlet_form_quadrature(d.u, flat=True) == pytest.approx(
        dirichlet_form_quadrature(data.u, flat=True), rel=1e-6)
    assert d.v.l2() == pytest.approx(data.v.l2(), rel=1e-6)
    assert Nonlinearity(d.grid).l6(d.u) == pytest.approx(Nonlinearity(data.grid).l6(data.u),
                                                         rel=1e-6)
    assert d.t == 0.0
    with pytest.raises(DomainError):
        dilate(data, 0.0)


def test_dilation_needs_modes(data):
    from cylwave.nlw import dilation_grid
    with pytest.raises(UnderResolvedError):
        dilate(data, 2.0, dilation_grid(data.grid, 2.0, data.grid.K), tol=1e-8)


# -- cone diagnostics -------------------------------------------------------

def test_linear_flux_balance(linear_traj):
    cone = ConeSpec((1.0, 0.0, 0.0), 3.0)
    fb = flux_balance(linear_traj, cone, -3.0, -1.0, n_r=8, n_c=8, n_phi=16)
    assert fb.relative < 1e-2
    assert fb.flux >= -1e-3 * fb.E_S


def test_flux_argument_checks(linear_traj):
    p = ConeProbe(linear_traj, ConeSpec((1.0, 0.0, 0.0), 3.0))
    with pytest.raises(DomainError):
        p.flux(-1.0, -2.0)
    with pytest.raises(DomainError):
        ConeSpec((1.0, 0.0), 3.0)
    with pytest.raises(DomainError):
        ConeSpec((1.0, 0.0, 0.0), 0.0)


def test_nonconcentration_profile(linear_traj, small_grid):
    cone = ConeSpec((1.0, 0.0, 0.0), 3.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ResolutionWarning)
        prof = nonconcentration_profile(linear_traj, cone, n_r=8, n_c=8, n_phi=16)
    assert prof[0][2] and not prof[-1][2]
    t, val, ok = last_resolvable(prof)
    assert ok and cone.radius(t) >= resolution_length(small_grid)
    assert all(v >= 0 for _, v, _ in prof)
    z = SpectralField.zeros(small_grid)
    zt = Trajectory(trajectory(WaveState(z, z), np.linspace(0, 3, 7)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ResolutionWarning)
        assert all(v == 0 for _, v, _ in nonconcentration_profile(zt, cone, n_r=4, n_c=4, n_phi=8))


def test_morawetz_on_linear_flow(linear_traj):
    cone = ConeSpec((1.0, 0.0, 0.0), 3.0)
    res = [morawetz_check(linear_traj, cone, S, n_r=8, n_c=8, n_phi=16) for S in (-2.0, -1.0)]
    assert all(r.holds for r in res)
    assert fitted_morawetz_constant(res) == 0.0


def test_normal_derivative_converges(linear_traj):
    exact = normal_derivative_norm(linear_traj, 1.0, dx=None)
    e1 = abs(normal_derivative_norm(linear_traj, 1.0, dx=2e-3) - exact)
    e2 = abs(normal_derivative_norm(linear_traj, 1.0, dx=1e-3) - exact)
    assert exact > 0
    assert e2 < 1e-3 * exact
    assert e1 / e2 > 1.8


@settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.integers(0, 2 ** 31), st.floats(0.1, 5.0), st.floats(0.1, 5.0))
def test_quintic_holder(small_grid, seed, A1, A2):
    times = np.linspace(0, 0.5, 6)
    a = Trajectory(trajectory(smooth_data(small_grid, seed, A1), times))
    b = Trajectory(trajectory(smooth_data(small_grid, seed + 1, A2), times))
    lhs, rhs = quintic_difference_check(a, b, C=5.0)
    assert lhs <= rhs


def test_diagnostics_table(linear_traj):
    rows = diagnostics_rows(Trajectory(linear_traj.states[:3]))
    text = diagnostics_csv(rows)
    assert text.splitlines()[0] == "t,energy,H1,L2t,L6,L5L10_partial"
    assert len(text.splitlines()) == 4
    assert rows[0][5] == 0.0


def test_trajectory_validation(data):
    with pytest.raises(DomainError):
        Trajectory([])
    with pytest.raises(DomainError):
        Trajectory(trajectory(data, [0.0, 0.1, 0.3]))
