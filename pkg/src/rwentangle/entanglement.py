"""Reduced out-region states of the in-vacuum and their von Neumann entropies.

The in-vacuum restricted to a mode pair (k, -k) is a two-mode squeezed
state. Tracing out one partner leaves a diagonal state with weights
proportional to x**n, x = |gamma|^2: n in {0, 1} for Dirac fields and
n = 0, 1, 2, ... for scalar fields. All entropies are in bits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bogoliubov import GammaSq, Statistics, gamma_sq
from .spectrum import ExpansionParams, ModeParams

LN2 = math.log(2.0)
DEFAULT_TRUNCATION = 512
MAX_TRUNCATION = 2**16
_TAIL_RATIO = 1e-15


class DomainError(ValueError):
    """Input outside the domain where the quantity is defined."""


def _softplus(x: float) -> float:
    """ln(1 + e^x)."""
    if x == -math.inf:
        return 0.0
    if x > 0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


def binary_entropy_from_logit(logit: float) -> float:
    """H(p) in bits for p = 1 / (1 + e^-logit)."""
    if logit == -math.inf or logit == math.inf:
        return 0.0
    # ln p = -softplus(-L), ln(1-p) = -softplus(L)
    lp = -_softplus(-logit)
    lq = -_softplus(logit)
    p = math.exp(lp)
    q = math.exp(lq)
    return -(p * lp + q * lq) / LN2


def fermion_entropy_from_log(log_x: float) -> float:
    """S_F = log2(1 + x) - x log2(x) / (1 + x) with x = exp(log_x).

    Equal to the binary entropy of x / (1 + x), which is how it is evaluated.
    """
    return binary_entropy_from_logit(log_x)


def boson_entropy_from_log(log_x: float) -> float:
    """S_B = -x log2(x) / (1 - x) - log2(1 - x) with x = exp(log_x) < 1."""
    if math.isnan(log_x) or log_x >= 0.0:
        raise DomainError(f"bosonic |gamma|^2 must be < 1, got exp({log_x!r})")
    if log_x == -math.inf:
        return 0.0
    x = math.exp(log_x)
    one_minus_x = -math.expm1(log_x)
    return (-x * log_x / one_minus_x - math.log(one_minus_x)) / LN2


def entropy_fermion(g: GammaSq) -> float:
    if g.statistics is not Statistics.FERMION:
        raise ValueError("entropy_fermion needs fermionic |gamma|^2")
    return fermion_entropy_from_log(g.log_value)


def entropy_boson(g: GammaSq) -> float:
    if g.statistics is not Statistics.BOSON:
        raise ValueError("entropy_boson needs bosonic |gamma|^2")
    return boson_entropy_from_log(g.log_value)


def entropy_boson_bruteforce(x: float, truncation: int) -> float:
    """-sum_{n=0}^{N} p_n log2 p_n for the geometric law p_n = (1 - x) x^n."""
    if not 0.0 <= x < 1.0:
        raise DomainError(f"x must lie in [0, 1), got {x!r}")
    if truncation < 1:
        raise ValueError("truncation must be >= 1")
    if x == 0.0:
        return 0.0
    n = np.arange(truncation + 1, dtype=float)
    log_p = math.log1p(-x) + n * math.log(x)
    p = np.exp(log_p)
    return float(-np.sum(p * log_p) / LN2)


@dataclass(frozen=True)
class ReducedState:
    """Diagonal reduced state in the occupation basis of one partner mode."""

    statistics: Statistics
    occupation_log_weights: tuple[float, ...]
    normalization: float

    def probabilities(self) -> np.ndarray:
        w = np.exp(np.asarray(self.occupation_log_weights))
        return w / self.normalization

    def entropy_bits(self) -> float:
        """Direct -sum p log2 p over the stored weights."""
        p = self.probabilities()
        nz = p[p > 0]
        return float(-np.sum(nz * np.log2(nz)))


def _log_sum_exp(values: np.ndarray) -> float:
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return -math.inf
    top = finite.max()
    return float(top + math.log(np.sum(np.exp(finite - top))))


def reduced_state(g: GammaSq, truncation: int = DEFAULT_TRUNCATION) -> ReducedState:
    """Reduced state of the in-vacuum for one mode.

    Fermions give weights (1, x). Bosons give the geometric tower
    1, x, x^2, ..., x^N; N starts at ``truncation`` and is doubled (up to
    2**16) while the last weight is still above 1e-15 of the total.
    """
    log_x = g.log_value
    if g.statistics is Statistics.FERMION:
        logs = np.array([0.0, log_x])
    else:
        if log_x >= 0.0:
            raise DomainError(f"bosonic |gamma|^2 must be < 1, got exp({log_x!r})")
        n_max = max(int(truncation), 1)
        while True:
            if log_x == -math.inf:
                logs = np.full(n_max + 1, -math.inf)
                logs[0] = 0.0
            else:
                logs = np.arange(n_max + 1, dtype=float) * log_x
            log_total = _log_sum_exp(logs)
            if logs[-1] - log_total <= math.log(_TAIL_RATIO) or n_max >= MAX_TRUNCATION:
                break
            n_max = min(2 * n_max, MAX_TRUNCATION)
    return ReducedState(g.statistics, tuple(float(v) for v in logs), math.exp(_log_sum_exp(logs)))


@dataclass(frozen=True)
class EntropySample:
    params: tuple[ExpansionParams, ModeParams]
    entropy_bits: float
    statistics: Statistics
    log_gamma_sq: float


def entropy_sample(p: ExpansionParams, mp: ModeParams, statistics: Statistics | str,
                   boson_form: str = "default") -> EntropySample:
    """Closed-form pipeline: params -> |gamma|^2 -> entropy in bits."""
    g = gamma_sq(p, mp, statistics, boson_form=boson_form)
    if g.statistics is Statistics.FERMION:
        s = entropy_fermion(g)
    else:
        s = entropy_boson(g)
    return EntropySample((p, mp), s, g.statistics, g.log_value)


def fermion_entropy(p: ExpansionParams, mp: ModeParams) -> float:
    return entropy_sample(p, mp, Statistics.FERMION).entropy_bits


def boson_entropy(p: ExpansionParams, mp: ModeParams, boson_form: str = "default") -> float:
    return entropy_sample(p, mp, Statistics.BOSON, boson_form).entropy_bits
