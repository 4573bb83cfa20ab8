"""Parameter types and closed-form kinematics of the tanh expansion profile.

The conformal factor is ``C(eta) = (1 + eps * (1 + tanh(rho * eta)))**2``,
flat in the far past (C = 1) and far future (C = (1 + 2 eps)**2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class ExpansionParams:
    """Volume (``epsilon``) and rapidity (``rho``) of the expansion."""

    epsilon: float
    rho: float

    def __post_init__(self):
        eps = _check_finite("epsilon", self.epsilon)
        rho = _check_finite("rho", self.rho)
        if eps <= 0:
            raise ValueError(f"epsilon must be > 0, got {eps!r}")
        if rho <= 0:
            raise ValueError(f"rho must be > 0, got {rho!r}")
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "rho", rho)


@dataclass(frozen=True)
class ModeParams:
    """Field mass and mode momentum magnitude |k|."""

    mass: float
    k: float

    def __post_init__(self):
        mass = _check_finite("mass", self.mass)
        k = _check_finite("k", self.k)
        if mass < 0:
            raise ValueError(f"mass must be >= 0, got {mass!r}")
        if k <= 0:
            raise ValueError(f"k must be > 0, got {k!r}")
        object.__setattr__(self, "mass", mass)
        object.__setattr__(self, "k", k)


@dataclass(frozen=True)
class Spectrum:
    """Asymptotic frequencies and effective masses for one mode.

    ``omega_bar_sq`` keeps the sign of ``m**2 (2 eps + 1)**2 - rho**2``; the
    frequency itself is imaginary when it is negative.

    The two gap fields are the cancellation-free forms of
    ``omega_minus - m*eps`` and ``omega_plus - m*eps``; ``out_kinetic`` is
    ``omega_out - mu_out`` evaluated as ``k**2 / (omega_out + mu_out)``.
    """

    mu_in: float
    mu_out: float
    omega_in: float
    omega_out: float
    omega_plus: float
    omega_minus: float
    omega_bar_sq: float
    mass_eps: float
    minus_gap: float
    plus_gap: float
    out_kinetic: float


def scale_factor(eta: float, p: ExpansionParams) -> float:
    """C(eta) = (1 + eps (1 + tanh(rho eta)))**2."""
    root = 1.0 + p.epsilon * (1.0 + math.tanh(p.rho * eta))
    return root * root


def scale_factor_derivative(eta: float, p: ExpansionParams) -> float:
    """dC/deta = 2 (1 + eps (1 + tanh rho eta)) eps rho sech^2(rho eta)."""
    x = p.rho * eta
    root = 1.0 + p.epsilon * (1.0 + math.tanh(x))
    if abs(x) > 350.0:
        return 0.0
    sech = 1.0 / math.cosh(x)
    return 2.0 * root * p.epsilon * p.rho * sech * sech


def sqrt_scale_factor_derivative(eta: float, p: ExpansionParams) -> float:
    """d sqrt(C)/deta = eps rho sech^2(rho eta); the Dirac coupling term."""
    x = p.rho * eta
    if abs(x) > 350.0:
        return 0.0
    sech = 1.0 / math.cosh(x)
    return p.epsilon * p.rho * sech * sech


def spectrum(p: ExpansionParams, mp: ModeParams) -> Spectrum:
    m, k, eps, rho = mp.mass, mp.k, p.epsilon, p.rho
    mu_in = m
    mu_out = m * (1.0 + 2.0 * eps)
    omega_in = math.hypot(k, mu_in)
    omega_out = math.hypot(k, mu_out)
    # omega_out**2 - omega_in**2 = mu_out**2 - mu_in**2 = 4 m^2 eps (1 + eps)
    omega_minus = 2.0 * m * m * eps * (1.0 + eps) / (omega_out + omega_in)
    omega_plus = 0.5 * (omega_out + omega_in)
    mass_eps = m * eps
    k_sq = k * k
    kin_out = k_sq / (omega_out + mu_out)
    # omega_minus - m eps = ((omega_out - mu_out) - (omega_in - mu_in)) / 2,
    # with the difference of the two kinetic terms taken in closed form
    minus_gap = -kin_out * (omega_minus + mass_eps) / (omega_in + mu_in)
    # omega_plus - m eps = ((omega_out - mu_out) + (omega_in + mu_in)) / 2
    plus_gap = 0.5 * (kin_out + omega_in + mu_in)
    two_eps_one = 2.0 * eps + 1.0
    omega_bar_sq = (m * two_eps_one - rho) * (m * two_eps_one + rho)
    return Spectrum(
        mu_in=mu_in,
        mu_out=mu_out,
        omega_in=omega_in,
        omega_out=omega_out,
        omega_plus=omega_plus,
        omega_minus=omega_minus,
        omega_bar_sq=omega_bar_sq,
        mass_eps=mass_eps,
        minus_gap=minus_gap,
        plus_gap=plus_gap,
        out_kinetic=kin_out,
    )
