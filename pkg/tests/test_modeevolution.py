import math

import numpy as np
import pytest

from rwentangle.bogoliubov import gamma_sq_boson, gamma_sq_boson_exact, gamma_sq_fermion
from rwentangle.modeevolution import (
    Branch,
    ModeTrajectory,
    integrate_mode,
    match_out,
    oracle_gamma_sq,
)
from rwentangle.spectrum import ExpansionParams, ModeParams, spectrum

UNIT = (ExpansionParams(1.0, 1.0), ModeParams(1.0, 1.0))


def plane_wave_trajectory(p, mp, conjugate=False):
    w = spectrum(p, mp).omega_out
    eta = np.linspace(0.0, 30.0 / p.rho, 5)
    sign = 1.0 if conjugate else -1.0
    phi = np.exp(sign * 1j * w * eta) / math.sqrt(2 * w)
    return ModeTrajectory(eta, phi, sign * 1j * w * phi)


# ------------------------------------------------------------ integrate_mode

def test_static_limit_is_plane_wave():
    p, mp = ExpansionParams(1e-12, 1.0), ModeParams(1.0, 1.0)
    for stats in ("boson", "fermion"):
        traj = integrate_mode(p, mp, stats)
        w = spectrum(p, mp).omega_in
        assert abs(traj.phi[-1]) * math.sqrt(2 * w) == pytest.approx(1.0, abs=1e-8)
        assert oracle_gamma_sq(p, mp, stats) < 1e-16


def test_trajectory_shape():
    traj = integrate_mode(*UNIT, "boson")
    assert np.all(np.diff(traj.eta_grid) > 0)
    assert traj.phi.shape == traj.dphi.shape == traj.eta_grid.shape
    assert np.all(np.isfinite(traj.phi))


def test_rejects_short_window_and_bad_tol():
    with pytest.raises(ValueError):
        integrate_mode(*UNIT, "boson", T=10.0)
    with pytest.raises(ValueError):
        integrate_mode(*UNIT, "boson", tol=1e-2)
    with pytest.raises(ValueError):
        integrate_mode(*UNIT, "boson", tol=1e-14)


def test_boson_wronskian():
    pair = match_out(integrate_mode(*UNIT, "boson"), *UNIT, "boson")
    assert pair.wronskian == pytest.approx(1.0, abs=1e-8)


def test_boson_matches_klein_gordon_connection_formula():
    ratio = oracle_gamma_sq(*UNIT, "boson")
    assert ratio == pytest.approx(gamma_sq_boson_exact(*UNIT).value, rel=1e-4)


def test_boson_default_form_disagrees_with_evolution():
    # documents the known gap between the default radicand and the mode equation
    ratio = oracle_gamma_sq(*UNIT, "boson")
    assert abs(ratio / gamma_sq_boson(*UNIT).value - 1) > 0.5


def test_plus_branch_available():
    traj = integrate_mode(*UNIT, "fermion", branch=Branch.PLUS)
    pair = match_out(traj, *UNIT, "fermion", Branch.PLUS)
    assert pair.branch is Branch.PLUS
    assert pair.residual < 1e-10
    assert math.isfinite(pair.ratio_sq)


# ------------------------------------------------------------ match_out

def test_match_identity():
    p, mp = ExpansionParams(1.0, 2.0), ModeParams(0.5, 1.3)
    pair = match_out(plane_wave_trajectory(p, mp), p, mp, "boson")
    assert pair.alpha == pytest.approx(1.0, abs=1e-12)
    assert abs(pair.beta) < 1e-12
    assert pair.residual < 1e-10


def test_match_conjugate():
    p, mp = ExpansionParams(1.0, 2.0), ModeParams(0.5, 1.3)
    pair = match_out(plane_wave_trajectory(p, mp, conjugate=True), p, mp, "boson")
    assert abs(pair.alpha) < 1e-12
    assert abs(pair.beta) == pytest.approx(1.0, abs=1e-12)


# ------------------------------------------------------------ oracle vs closed form

def test_fermion_unit_point():
    traj = integrate_mode(*UNIT, "fermion", Branch.MINUS)
    pair = match_out(traj, *UNIT, "fermion", Branch.MINUS)
    assert pair.residual < 1e-6
    s = spectrum(*UNIT)
    ratio = pair.ratio_sq * (UNIT[1].k / (s.omega_out + s.mu_out)) ** 2
    assert ratio == pytest.approx(gamma_sq_fermion(*UNIT).value, rel=1e-3)


@pytest.mark.parametrize("stats", ["fermion", "boson"])
def test_massless_oracle(stats):
    p, mp = ExpansionParams(1.0, 1.0), ModeParams(0.0, 1.0)
    assert oracle_gamma_sq(p, mp, stats) == pytest.approx(0.0, abs=1e-8)


@pytest.mark.parametrize("eps,rho,m,k", [(2.0, 0.5, 1.0, 0.7), (1.0, 5.0, 2.0, 1.0)])
def test_grid_points(eps, rho, m, k):
    p, mp = ExpansionParams(eps, rho), ModeParams(m, k)
    assert oracle_gamma_sq(p, mp, "fermion") == pytest.approx(gamma_sq_fermion(p, mp).value, rel=1e-3)
    assert oracle_gamma_sq(p, mp, "boson") == pytest.approx(gamma_sq_boson_exact(p, mp).value, rel=1e-3)


# ------------------------------------------------------------ robustness

@pytest.mark.parametrize("stats", ["fermion", "boson"])
def test_phase_independence(stats):
    branch = Branch.MINUS if stats == "fermion" else None
    ratios = []
    for phase in (1.0, 1j, np.exp(0.7j), -1.0):
        pair = match_out(integrate_mode(*UNIT, stats, branch, phase=phase), *UNIT, stats)
        ratios.append(pair.ratio_sq)
    assert np.allclose(ratios, ratios[0], rtol=1e-10, atol=0)


@pytest.mark.parametrize("stats", ["fermion", "boson"])
def test_window_independence(stats):
    p, mp = UNIT
    a = oracle_gamma_sq(p, mp, stats, T=20.0)
    b = oracle_gamma_sq(p, mp, stats, T=30.0)
    assert b == pytest.approx(a, rel=1e-6)


@pytest.mark.parametrize("eps,rho,m,k", [(1.0, 1.0, 1.0, 1.0), (2.0, 0.5, 1.0, 0.7), (1.0, 5.0, 2.0, 1.0)])
def test_convergence_in_tolerance(eps, rho, m, k):
    p, mp = ExpansionParams(eps, rho), ModeParams(m, k)
    exact = gamma_sq_fermion(p, mp).value
    errors = [abs(oracle_gamma_sq(p, mp, "fermion", tol=tol) / exact - 1) for tol in (1e-4, 1e-6, 1e-8, 1e-10)]
    assert all(b < a for a, b in zip(errors, errors[1:])), errors
