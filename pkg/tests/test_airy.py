import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cylwave.airy import ai, ai_eval, ai_zero, ai_zeros, asymptotic_zero, zero_table
from cylwave.errors import DomainError

mp.mp.dps = 40


def series_ai0():
    # Ai(0) = 3^(-2/3) / Gamma(2/3)
    return float(mp.mpf(3) ** (-mp.mpf(2) / 3) / mp.gamma(mp.mpf(2) / 3))


def test_ai_at_zero_matches_series():
    a, ap = ai_eval(0.0)
    assert abs(a - series_ai0()) < 1e-15
    assert abs(ap + float(mp.mpf(3) ** (-mp.mpf(1) / 3) / mp.gamma(mp.mpf(1) / 3))) < 1e-15


@pytest.mark.parametrize("x", [-200.0, -57.3, -8.01, -7.99, -1.0, 0.5, 5.0, 7.99, 8.01, 25.0])
def test_ai_against_mpmath(x):
    a, ap = ai_eval(x)
    # oscillatory side: absolute error on the |x|^(1/4) envelope scale
    scale = max(1.0, abs(x)) ** 0.25
    assert abs(a - float(mp.airyai(x))) < 1e-13 * scale
    assert abs(ap - float(mp.airyai(x, 1))) < 1e-13 * scale ** 3


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=0.0, max_value=80.0))
def test_relative_accuracy_on_decaying_side(x):
    a, ap = ai_eval(x)
    assert a == pytest.approx(float(mp.airyai(x)), rel=1e-12)
    assert ap == pytest.approx(float(mp.airyai(x, 1)), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=-300.0, max_value=-0.5))
def test_wronskian_like_ode_residual(x):
    # Ai'' = x Ai, checked by a centred difference of the returned derivative
    d = 1e-5 * max(1.0, abs(x)) ** -0.5
    app = (ai_eval(x + d)[1] - ai_eval(x - d)[1]) / (2 * d)
    assert abs(app - x * ai(x)) < 1e-6 * max(1.0, abs(x)) ** 1.25


def test_array_shape_and_scalar_type():
    x = np.linspace(-10, 10, 12).reshape(3, 4)
    a, ap = ai_eval(x)
    assert a.shape == ap.shape == (3, 4)
    assert isinstance(ai_eval(1.0)[0], float)


def test_nonfinite_argument_rejected():
    with pytest.raises(DomainError):
        ai_eval(np.nan)


def test_first_zeros_against_mpmath():
    om = ai_zeros(20)
    ref = np.array([float(-mp.airyaizero(k)) for k in range(1, 21)])
    assert np.max(np.abs(om - ref)) < 1e-13
    assert np.all(np.abs(ai(-om)) < 1e-10)


def test_zero_asymptotics_and_ordering():
    om = ai_zeros(400)
    k = np.arange(1, 401)
    assert np.all(np.diff(om) > 0)
    rel = np.abs(om / asymptotic_zero(k) - 1)
    assert np.all(rel[4:] <= 1.0 / k[4:])


def test_single_zero_and_table_consistency():
    t = zero_table(30)
    assert ai_zero(7) == pytest.approx(t.omega[6], abs=1e-14)
    assert t.f[0] == pytest.approx(1.42610463, abs=1e-8)


@pytest.mark.parametrize("k", [1, 2, 5, 13])
def test_normalisation_constant_against_quadrature(k):
    t = zero_table(k)
    om = t.omega[k - 1]
    integral = mp.quad(lambda s: mp.airyai(s) ** 2, [-om, 0, mp.inf])
    assert t.f[k - 1] == pytest.approx(k ** (1 / 6) / math.sqrt(float(integral)), rel=1e-10)


def test_table_csv_rows():
    lines = zero_table(10).to_csv().strip().splitlines()
    assert lines[0] == "k,omega_k,ai_prime,f_k"
    assert len(lines) == 11
    assert float(lines[1].split(",")[1]) == pytest.approx(2.338107410459767, abs=1e-15)


@pytest.mark.parametrize("bad", [0, -3, 2.5])
def test_bad_table_size(bad):
    with pytest.raises(DomainError):
        zero_table(bad)
    with pytest.raises(DomainError):
        ai_zero(bad)
