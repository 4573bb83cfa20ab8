"""Numerical mode evolution across the expansion and asymptotic matching.

Independent check of the closed forms in :mod:`rwentangle.bogoliubov`: the
mode equation is integrated from the flat in-region to the flat out-region
starting from the positive-frequency in-mode, and the endpoint is decomposed
into out-region plane waves. No hypergeometric functions are involved.

Mode equations (conformal time, 2-D):

* scalar:  phi'' + (k^2 + m^2 C) phi = 0
* Dirac:   phi'' + (k^2 + m^2 C +/- i m d(sqrt C)/deta) phi = 0

The Dirac coupling is ``i m C' / (2 sqrt C)``; it comes from squaring the
first-order equation with the time-dependent mass ``m sqrt(C)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .bogoliubov import Statistics
from .spectrum import (
    ExpansionParams,
    ModeParams,
    scale_factor,
    spectrum,
    sqrt_scale_factor_derivative,
)

MIN_RHO_T = 20.0
DEFAULT_RHO_T = 25.0
DEFAULT_TOL = 1e-10


class Branch(str, enum.Enum):
    PLUS = "plus"
    MINUS = "minus"


class IntegrationError(RuntimeError):
    """The adaptive integrator could not reach the out-region."""


@dataclass(frozen=True)
class ModeTrajectory:
    eta_grid: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray


@dataclass(frozen=True)
class BogoliubovPair:
    alpha: complex
    beta: complex
    statistics: Statistics
    branch: Branch | None
    residual: float

    @property
    def ratio_sq(self) -> float:
        return abs(self.beta) ** 2 / abs(self.alpha) ** 2

    @property
    def wronskian(self) -> float:
        """|alpha|^2 - |beta|^2; equals 1 for scalar fields."""
        return abs(self.alpha) ** 2 - abs(self.beta) ** 2


def _frequency_sq(p: ExpansionParams, mp: ModeParams, statistics: Statistics,
                  branch: Branch | None):
    m2, k2 = mp.mass * mp.mass, mp.k * mp.k
    if statistics is Statistics.BOSON:
        return lambda eta: k2 + m2 * scale_factor(eta, p)
    sign = 1.0 if branch is Branch.PLUS else -1.0
    coupling = sign * mp.mass

    def w2(eta):
        return k2 + m2 * scale_factor(eta, p) + 1j * coupling * sqrt_scale_factor_derivative(eta, p)

    return w2


def integrate_mode(p: ExpansionParams, mp: ModeParams, statistics: Statistics | str,
                   branch: Branch | str | None = Branch.MINUS, T: float | None = None,
                   tol: float = DEFAULT_TOL, phase: complex = 1.0) -> ModeTrajectory:
    """Evolve the in-mode ``e^{-i w_in eta} / sqrt(2 w_in)`` from -T to +T.

    ``T`` defaults to 25/rho; values with rho*T < 20 are rejected because
    the endpoints would not sit in the flat regions. ``phase`` multiplies the
    initial data (the extracted ratio must not depend on it).
    """
    statistics = Statistics(statistics)
    branch = None if statistics is Statistics.BOSON else Branch(branch or Branch.MINUS)
    if T is None:
        T = DEFAULT_RHO_T / p.rho
    if p.rho * T < MIN_RHO_T:
        raise ValueError(f"rho*T = {p.rho * T:g} < {MIN_RHO_T}; endpoints not asymptotically flat")
    if not 1e-13 < tol < 1e-3:
        raise ValueError(f"tol must lie in (1e-13, 1e-3), got {tol!r}")

    s = spectrum(p, mp)
    w_in = s.omega_in
    w2 = _frequency_sq(p, mp, statistics, branch)

    def rhs(eta, y):
        return np.array([y[1], -w2(eta) * y[0]])

    start = phase * np.exp(1j * w_in * T) / math.sqrt(2.0 * w_in)
    y0 = np.array([start, -1j * w_in * start], dtype=complex)
    sol = solve_ivp(rhs, (-T, T), y0, method="DOP853", rtol=tol, atol=tol)
    if not sol.success:
        raise IntegrationError(sol.message)
    phi, dphi = sol.y
    if not (np.all(np.isfinite(phi)) and np.all(np.isfinite(dphi))):
        raise IntegrationError("non-finite mode amplitude")
    return ModeTrajectory(sol.t, phi, dphi)


def match_out(traj: ModeTrajectory, p: ExpansionParams, mp: ModeParams,
              statistics: Statistics | str, branch: Branch | str | None = None) -> BogoliubovPair:
    """Decompose the endpoint as alpha u + beta u* with u = e^{-i w_out eta} / sqrt(2 w_out)."""
    statistics = Statistics(statistics)
    w_out = spectrum(p, mp).omega_out
    assert w_out > 0.0
    eta = traj.eta_grid[-1]
    u = np.exp(-1j * w_out * eta) / math.sqrt(2.0 * w_out)
    basis = np.array([[u, np.conj(u)], [-1j * w_out * u, 1j * w_out * np.conj(u)]])
    rhs = np.array([traj.phi[-1], traj.dphi[-1]])
    alpha, beta = np.linalg.solve(basis, rhs)
    residual = float(np.linalg.norm(basis @ np.array([alpha, beta]) - rhs) / np.linalg.norm(rhs))
    if branch is not None:
        branch = Branch(branch)
    return BogoliubovPair(complex(alpha), complex(beta), statistics, branch, residual)


def oracle_gamma_sq(p: ExpansionParams, mp: ModeParams, statistics: Statistics | str,
                    tol: float = DEFAULT_TOL, T: float | None = None) -> float:
    """|beta/alpha|^2 from numerical evolution, comparable with the closed forms.

    Fermions integrate the minus branch and include the spinor factor
    k^2 / (omega_out + mu_out)^2.
    """
    statistics = Statistics(statistics)
    branch = Branch.MINUS if statistics is Statistics.FERMION else None
    traj = integrate_mode(p, mp, statistics, branch, T=T, tol=tol)
    pair = match_out(traj, p, mp, statistics, branch)
    ratio = pair.ratio_sq
    if statistics is Statistics.FERMION:
        s = spectrum(p, mp)
        ratio *= (mp.k / (s.omega_out + s.mu_out)) ** 2
    return ratio
