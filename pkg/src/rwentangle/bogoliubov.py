"""Closed-form squared Bogoliubov ratios |beta/alpha|^2 in log domain.

Everything is returned as the natural log of the squared ratio so that
parameter points with sinh/cosh arguments in the thousands (large eps, small
rho) neither overflow nor lose the ratio to 0/0.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .spectrum import ExpansionParams, ModeParams, Spectrum, spectrum

LN2 = math.log(2.0)
_SERIES_CUTOFF = 1e-8
_ZERO_TOL = 1e-300


class Statistics(str, enum.Enum):
    FERMION = "fermion"
    BOSON = "boson"


@dataclass(frozen=True)
class GammaSq:
    """log |gamma|^2 tagged with the statistics it belongs to.

    For fermions the stored value already includes the spinor factor
    |chi|^2 = k^2 / (omega_out + mu_out)^2, i.e. it is the Schmidt ratio of
    the out-region pair state.
    """

    log_value: float
    statistics: Statistics

    def __post_init__(self):
        if math.isnan(self.log_value) or self.log_value == math.inf:
            raise ValueError(f"log |gamma|^2 must be finite or -inf, got {self.log_value!r}")

    @property
    def value(self) -> float:
        return math.exp(self.log_value)


def log_cosh(x: float) -> float:
    """ln cosh x without overflow."""
    ax = abs(x)
    return ax + math.log1p(math.exp(-2.0 * ax)) - LN2


def log_abs_sinh(x: float) -> float:
    """ln |sinh x|; returns -inf at x = 0."""
    ax = abs(x)
    if ax == 0.0:
        return -math.inf
    if ax < 1.0:
        return math.log(math.sinh(ax))
    return ax + math.log(-math.expm1(-2.0 * ax)) - LN2


def _log_sinh_over_arg(scale: float, x: float) -> float:
    """ln |sinh(scale*x) / x|, regular at x = 0."""
    z = scale * x
    if abs(z) < _SERIES_CUTOFF:
        return math.log(scale) + math.log1p(z * z / 6.0)
    return log_abs_sinh(z) - math.log(abs(x))


def _log_sinh_times_arg(scale: float, x: float) -> float:
    """ln |x sinh(scale*x)|."""
    return log_abs_sinh(scale * x) + math.log(abs(x))


def log_abs_gamma_minus_sq(p: ExpansionParams, mp: ModeParams, s: Spectrum | None = None) -> float:
    """ln |beta^(-)/alpha^(-)|^2 for the Dirac minus branch.

    Product of the algebraic prefactor
    (w- + m eps)(w+ + m eps) / ((w- - m eps)(w+ - m eps)) in absolute value
    and the sinh ratio sinh(a(w- - m eps)) sinh(a(w- + m eps)) /
    (sinh(a(w+ + m eps)) sinh(a(w+ - m eps))) with a = pi/rho. Each algebraic
    factor is fused with the sinh that shares its argument.
    """
    if mp.mass <= _ZERO_TOL or p.epsilon <= _ZERO_TOL:
        return -math.inf
    s = s or spectrum(p, mp)
    a = math.pi / p.rho
    minus_sum = s.omega_minus + s.mass_eps
    plus_sum = s.omega_plus + s.mass_eps
    return (
        _log_sinh_over_arg(a, s.minus_gap)
        + _log_sinh_times_arg(a, minus_sum)
        - _log_sinh_over_arg(a, plus_sum)
        - _log_sinh_times_arg(a, s.plus_gap)
    )


def log_chi_sq(mp: ModeParams, s: Spectrum) -> float:
    """ln |chi|^2 = ln k^2 - 2 ln(omega_out + mu_out)."""
    return 2.0 * (math.log(mp.k) - math.log(s.omega_out + s.mu_out))


def gamma_sq_fermion(p: ExpansionParams, mp: ModeParams) -> GammaSq:
    """|gamma_F|^2 = |gamma^-|^2 |chi|^2 for a Dirac field."""
    if mp.mass <= _ZERO_TOL or p.epsilon <= _ZERO_TOL:
        return GammaSq(-math.inf, Statistics.FERMION)
    s = spectrum(p, mp)
    return GammaSq(log_abs_gamma_minus_sq(p, mp, s) + log_chi_sq(mp, s), Statistics.FERMION)


def _log_cosh_sum(lift: float, rho: float, y: float) -> float:
    """ln(cosh(pi*wbar/rho) + cosh(y)) with wbar^2 = lift - rho^2.

    cosh -> cos when wbar^2 < 0. Passing lift = wbar^2 + rho^2 >= 0 rather
    than wbar^2 keeps pi - theta accurate when wbar^2 is close to -rho^2.
    """
    omega_bar_sq = (math.sqrt(lift) - rho) * (math.sqrt(lift) + rho)
    if omega_bar_sq >= 0.0:
        x = math.pi * math.sqrt(omega_bar_sq) / rho
        lx, ly = log_cosh(x), log_cosh(y)
        hi, lo = max(lx, ly), min(lx, ly)
        return hi + math.log1p(math.exp(lo - hi))
    root = math.sqrt(-omega_bar_sq)
    theta = math.pi * root / rho
    if abs(y) < 30.0:
        # cosh y + cos t = 2 sinh^2(y/2) + 2 cos^2(t/2); no cancellation at y -> 0, t -> pi
        sh = math.sinh(0.5 * y)
        c = math.sin(0.5 * math.pi * lift / (rho * (rho + root)))
        total = sh * sh + c * c
        if total == 0.0:
            return -math.inf
        return LN2 + math.log(total)
    ly = log_cosh(y)
    return ly + math.log1p(math.cos(theta) * math.exp(-ly))


def _log_boson_ratio(lift: float, p: ExpansionParams, s: Spectrum) -> float:
    if s.omega_minus == 0.0:
        return -math.inf
    two_a = 2.0 * math.pi / p.rho
    num = _log_cosh_sum(lift, p.rho, two_a * s.omega_minus)
    if num == -math.inf:
        return -math.inf
    den = _log_cosh_sum(lift, p.rho, two_a * s.omega_plus)
    return num - den


def gamma_sq_boson(p: ExpansionParams, mp: ModeParams) -> GammaSq:
    """|gamma_B|^2 for a scalar field, with wbar^2 = m^2 (2 eps + 1)^2 - rho^2.

    This radicand does not reproduce the numerical evolution of the
    Klein-Gordon mode equation (and the ratio stays finite as eps -> 0);
    :func:`gamma_sq_boson_exact` does. Kept as the default because the
    reported asymptotic bosonic entropies are computed with it.
    """
    s = spectrum(p, mp)
    lift = (mp.mass * (2.0 * p.epsilon + 1.0)) ** 2
    return GammaSq(_log_boson_ratio(lift, p, s), Statistics.BOSON)


def exact_omega_bar_sq(p: ExpansionParams, mp: ModeParams) -> float:
    """4 m^2 eps^2 - rho^2, the radicand matching the Klein-Gordon evolution."""
    two_m_eps = 2.0 * mp.mass * p.epsilon
    return (two_m_eps - p.rho) * (two_m_eps + p.rho)


def gamma_sq_boson_exact(p: ExpansionParams, mp: ModeParams) -> GammaSq:
    """|gamma_B|^2 with the sech^2 strength of m^2 C(eta) taken into account.

    Writing m^2 C = m^2 (1 + eps)^2 + m^2 eps^2 + 2 m^2 eps (1 + eps) tanh
    - m^2 eps^2 sech^2 gives a Rosen-Morse problem whose connection formula
    has wbar^2 = 4 m^2 eps^2 - rho^2 inside the same cosh-ratio.
    """
    s = spectrum(p, mp)
    lift = (2.0 * mp.mass * p.epsilon) ** 2
    return GammaSq(_log_boson_ratio(lift, p, s), Statistics.BOSON)


BOSON_FORMS = {"default": gamma_sq_boson, "exact": gamma_sq_boson_exact}


def gamma_sq(p: ExpansionParams, mp: ModeParams, statistics: Statistics | str,
             boson_form: str = "default") -> GammaSq:
    statistics = Statistics(statistics)
    if statistics is Statistics.FERMION:
        return gamma_sq_fermion(p, mp)
    try:
        return BOSON_FORMS[boson_form](p, mp)
    except KeyError:
        raise ValueError(f"unknown boson form {boson_form!r}") from None
