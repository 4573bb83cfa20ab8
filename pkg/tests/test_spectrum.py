import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rwentangle.spectrum import (
    ExpansionParams,
    ModeParams,
    scale_factor,
    scale_factor_derivative,
    spectrum,
)

pos = st.floats(min_value=1e-3, max_value=1e3)


def test_scale_factor_limits():
    p = ExpansionParams(1.0, 1.0)
    assert scale_factor(-1e6, p) == pytest.approx(1.0, abs=1e-12)
    assert scale_factor(1e6, p) == pytest.approx(9.0, abs=1e-12)
    assert scale_factor(0.0, ExpansionParams(1.0, 7.0)) == 4.0


def test_scale_factor_derivative_values():
    p = ExpansionParams(1.0, 1.0)
    assert scale_factor_derivative(1e6, p) == pytest.approx(0.0, abs=1e-12)
    assert scale_factor_derivative(-1e6, p) == pytest.approx(0.0, abs=1e-12)
    assert scale_factor_derivative(0.0, p) == 4.0


def test_scale_factor_derivative_finite_difference():
    p = ExpansionParams(2.0, 0.5)
    h = 1e-5
    fd = (scale_factor(1.0 + h, p) - scale_factor(1.0 - h, p)) / (2 * h)
    assert scale_factor_derivative(1.0, p) == pytest.approx(fd, abs=1e-8)


@given(eps=pos, rho=pos, x=st.floats(-5, 5))
def test_derivative_matches_central_difference(eps, rho, x):
    p = ExpansionParams(eps, rho)
    eta = x / rho
    h = 1e-5 / rho
    fd = (scale_factor(eta + h, p) - scale_factor(eta - h, p)) / (2 * h)
    roundoff = 4 * np.spacing(scale_factor(eta, p)) / h
    assert scale_factor_derivative(eta, p) == pytest.approx(fd, rel=1e-6, abs=roundoff)


@given(eps=pos, rho=pos, a=st.floats(-100, 100), b=st.floats(-100, 100))
def test_scale_factor_monotone(eps, rho, a, b):
    p = ExpansionParams(eps, rho)
    lo, hi = sorted((a, b))
    assert scale_factor(lo, p) <= scale_factor(hi, p)


def test_spectrum_closed_form():
    s = spectrum(ExpansionParams(1.0, 1.0), ModeParams(1.0, 1.0))
    assert s.mu_in == 1.0 and s.mu_out == 3.0
    assert s.omega_in == pytest.approx(math.sqrt(2), rel=1e-15)
    assert s.omega_out == pytest.approx(math.sqrt(10), rel=1e-15)
    assert s.omega_plus == pytest.approx((math.sqrt(10) + math.sqrt(2)) / 2, rel=1e-15)
    assert s.omega_minus == pytest.approx((math.sqrt(10) - math.sqrt(2)) / 2, rel=1e-15)
    assert s.omega_bar_sq == 8.0


@pytest.mark.parametrize("eps,rho", [(1.0, 1.0), (0.3, 5.0)])
def test_massless_spectrum(eps, rho):
    s = spectrum(ExpansionParams(eps, rho), ModeParams(0.0, 2.0))
    assert s.mu_in == s.mu_out == 0.0
    assert s.omega_in == s.omega_out == 2.0
    assert s.omega_minus == 0.0
    assert s.omega_bar_sq == -rho * rho


def test_imaginary_omega_bar_regime():
    s = spectrum(ExpansionParams(1.0, 1000.0), ModeParams(1.0, 1.0))
    assert s.omega_bar_sq == pytest.approx(9.0 - 1e6)
    assert s.omega_bar_sq < 0


@given(eps=pos, rho=pos, m=st.floats(0.0, 1e3), k=pos)
def test_spectrum_invariants(eps, rho, m, k):
    s = spectrum(ExpansionParams(eps, rho), ModeParams(m, k))
    assert s.omega_in >= s.mu_in and s.omega_out >= s.mu_out
    assert s.mu_out >= s.mu_in
    assert s.omega_out >= s.omega_in
    assert s.omega_minus >= 0
    assert s.omega_plus == pytest.approx((s.omega_out + s.omega_in) / 2, rel=1e-15)
    assert s.omega_minus == pytest.approx((s.omega_out - s.omega_in) / 2, rel=1e-9, abs=1e-12 * s.omega_out)
    assert s.minus_gap == pytest.approx(s.omega_minus - s.mass_eps, rel=1e-7, abs=1e-9 * s.omega_out)
    assert s.plus_gap == pytest.approx(s.omega_plus - s.mass_eps, rel=1e-9)
    assert abs(s.omega_out**2 - s.mu_out**2 - k * k) <= 4 * np.spacing(s.omega_out**2)
    if m == 0.0:
        assert s.omega_minus == 0.0


def test_kinetic_identity_log_grid():
    grid = np.geomspace(1e-3, 1e3, 25)
    p = ExpansionParams(1.0, 1.0)
    for m in grid:
        for k in grid:
            s = spectrum(p, ModeParams(m, k))
            prod = s.out_kinetic * (s.omega_out + s.mu_out)
            assert abs(prod - k * k) <= 8 * np.spacing(k * k)


@pytest.mark.parametrize("kwargs", [dict(epsilon=0.0, rho=1.0), dict(epsilon=1.0, rho=-1.0),
                                    dict(epsilon=math.inf, rho=1.0)])
def test_expansion_params_validation(kwargs):
    with pytest.raises(ValueError):
        ExpansionParams(**kwargs)


@pytest.mark.parametrize("kwargs", [dict(mass=-1.0, k=1.0), dict(mass=1.0, k=0.0),
                                    dict(mass=math.nan, k=1.0)])
def test_mode_params_validation(kwargs):
    with pytest.raises(ValueError):
        ModeParams(**kwargs)
