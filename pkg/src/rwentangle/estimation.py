"""Optimal-mode search and inversion of fermionic entanglement.

* :func:`optimal_k` finds the momentum of maximal fermionic entropy.
* :func:`max_entanglement` maximizes over mass as well, giving S_max(eps).
* :func:`estimate_rho` inverts an observed optimal momentum into a rapidity.
* :func:`epsilon_lower_bound` inverts S_max(eps) into a lower bound on eps.

The fermionic entropy depends on (m, k, rho) only through m/rho and k/rho,
which is why S_max does not depend on rho.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .entanglement import fermion_entropy
from .spectrum import ExpansionParams, ModeParams

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

FLAT_ENTROPY_FLOOR = 1e-12
K_RTOL = 1e-6
CERTIFICATE_STEP = 1e-3
SCAN_MIN_POINTS = 64
SCAN_POINTS_PER_DECADE = 16
TIE_TOL = 1e-9

MASS_RANGE = (1e-4, 1e2)
MASS_LOG_TOL = 1e-4
RHO_RTOL = 1e-4
EPS_RTOL = 1e-6
EPS_UPPER_LIMIT = 1e8
EPS_LOWER_LIMIT = 1e-8
MONOTONE_SAMPLES = 8


class EstimationError(RuntimeError):
    """Base class for estimation failures; ``kind`` names the failure."""

    kind = "estimation"


class FlatEntropyError(EstimationError):
    kind = "flat-entropy"


class BracketError(EstimationError):
    kind = "bracket"


class MonotonicityError(EstimationError):
    kind = "monotonicity"


class CertificateError(EstimationError):
    kind = "certificate"


@dataclass(frozen=True)
class OptimalMode:
    k_star: float
    entropy_at_peak: float
    params: tuple[ExpansionParams, float]
    entropy_left: float
    entropy_right: float
    warning: str | None = None

    @property
    def certified(self) -> bool:
        return self.entropy_at_peak >= max(self.entropy_left, self.entropy_right)


@dataclass(frozen=True)
class EstimationResult:
    estimate: float
    bracket: tuple[float, float]
    residual: float
    iterations: int


class MaxEntanglement(NamedTuple):
    m_star: float
    k_star: float
    s_max: float


def golden_section_max(f: Callable[[float], float], lo: float, hi: float,
                       tol: float, max_iter: int = 200) -> tuple[float, float, int]:
    """Maximize a unimodal f on [lo, hi]; returns (x, f(x), iterations).

    The best of the two interior probes and both endpoints is returned, so a
    maximum sitting on the boundary is reported as the boundary point.
    """
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while b - a > tol and it < max_iter:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
        it += 1
    x, fx = (c, fc) if fc >= fd else (d, fd)
    for edge in (lo, hi):
        if abs(x - edge) <= tol:
            fe = f(edge)
            if fe > fx:
                x, fx = edge, fe
    return x, fx, it


def bisect_increasing(g: Callable[[float], float], lo: float, hi: float,
                      done: Callable[[float, float], bool], max_iter: int = 200):
    """Root of an increasing g on [lo, hi] with g(lo) <= 0 <= g(hi).

    ``done(lo, hi)`` decides convergence. Returns (midpoint, lo, hi, iterations).
    """
    it = 0
    while not done(lo, hi) and it < max_iter:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        it += 1
    return 0.5 * (lo + hi), lo, hi, it


def _entropy_k(p: ExpansionParams, mass: float) -> Callable[[float], float]:
    def s_of_logk(logk: float) -> float:
        return fermion_entropy(p, ModeParams(mass, math.exp(logk)))

    return s_of_logk


def _scan(f, log_lo: float, log_hi: float) -> tuple[np.ndarray, np.ndarray]:
    decades = (log_hi - log_lo) / math.log(10.0)
    n = max(SCAN_MIN_POINTS, int(math.ceil(SCAN_POINTS_PER_DECADE * decades)) + 1)
    grid = np.linspace(log_lo, log_hi, n)
    return grid, np.array([f(u) for u in grid])


def optimal_k(p: ExpansionParams, mass: float) -> OptimalMode:
    """Momentum that maximizes the fermionic entropy at fixed mass.

    A log-spaced scan over [1e-3 min(m, rho), 1e3 max(m, rho)] (widened until
    both ends fall below 1e-6 of the peak) brackets the maximum, then golden
    section refines log k to a relative k tolerance of 1e-6.
    """
    mass = float(mass)
    if not math.isfinite(mass) or mass < 0:
        raise ValueError(f"mass must be a finite positive number, got {mass!r}")
    if mass == 0.0:
        raise FlatEntropyError("fermionic entropy vanishes identically at m = 0")
    f = _entropy_k(p, mass)
    log_lo = math.log(1e-3 * min(mass, p.rho))
    log_hi = math.log(1e3 * max(mass, p.rho))
    widen = math.log(10.0)
    for _ in range(12):
        grid, vals = _scan(f, log_lo, log_hi)
        peak = vals.max()
        if peak < FLAT_ENTROPY_FLOOR:
            break
        expanded = False
        if vals[-1] >= 1e-6 * peak:
            log_hi += widen
            expanded = True
        if vals[0] >= 1e-6 * peak:
            log_lo -= widen
            expanded = True
        if not expanded:
            break
    if peak < FLAT_ENTROPY_FLOOR:
        raise FlatEntropyError(
            f"peak fermionic entropy {peak:.3g} below {FLAT_ENTROPY_FLOOR:g} "
            f"(mass={mass:g}, rho={p.rho:g}, epsilon={p.epsilon:g})")

    interior = [i for i in range(1, len(vals) - 1)
                if vals[i] >= vals[i - 1] and vals[i] >= vals[i + 1]]
    if not interior:
        interior = [int(np.argmax(vals))]
    best = max(vals[i] for i in interior)
    ties = [i for i in interior if best - vals[i] <= TIE_TOL]
    i = ties[0]
    warning = None
    if len(ties) > 1:
        warning = f"multi-modal entropy in k: {len(ties)} near-equal peaks, smallest k refined"
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, len(grid) - 1)]
    logk, s_peak, _ = golden_section_max(f, a, b, tol=K_RTOL)

    k_star = math.exp(logk)
    left = f(logk + math.log1p(-CERTIFICATE_STEP))
    right = f(logk + math.log1p(CERTIFICATE_STEP))
    mode = OptimalMode(k_star, s_peak, (p, mass), left, right, warning)
    if not mode.certified:
        raise CertificateError(
            f"k*={k_star:.6g} is not a local maximum: S={s_peak:.12g}, "
            f"neighbours {left:.12g}, {right:.12g}")
    return mode


def max_entanglement(p: ExpansionParams) -> MaxEntanglement:
    """Joint maximum of the fermionic entropy over mass and momentum.

    Golden section over log(m / rho) in [1e-4, 1e2] of the optimal_k peak.
    The peak entropy decreases with m / rho, so the maximizer is the lower end
    of the mass range, where the peak is within ~1e-7 of its m -> 0 limit.
    """
    lo, hi = (math.log(r * p.rho) for r in MASS_RANGE)
    cache: dict[float, OptimalMode] = {}

    def peak(logm: float) -> float:
        if logm not in cache:
            cache[logm] = optimal_k(p, math.exp(logm))
        return cache[logm].entropy_at_peak

    logm, s_max, _ = golden_section_max(peak, lo, hi, tol=MASS_LOG_TOL)
    return MaxEntanglement(math.exp(logm), cache[logm].k_star, s_max)


def _require_monotone(values: list[float], what: str) -> None:
    diffs = np.diff(values)
    if not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise MonotonicityError(f"{what} is not monotone on the sampled points: {values}")


def estimate_rho(mass: float, k_observed: float, epsilon_ref: float = 1.0,
                 bracket: tuple[float, float] = (1.0, 2000.0)) -> EstimationResult:
    """Rapidity whose optimal momentum (at ``mass``, ``epsilon_ref``) equals ``k_observed``.

    The bracket is sampled at 8 log-spaced rapidities to confirm that the
    optimal momentum is monotone there; bisection in log rho then runs to a
    relative tolerance of 1e-4.
    """
    rho_lo, rho_hi = map(float, bracket)
    if not 0 < rho_lo < rho_hi:
        raise ValueError(f"bracket must satisfy 0 < lo < hi, got {bracket!r}")
    if k_observed <= 0:
        raise ValueError("k_observed must be > 0")

    def k_at(rho: float) -> float:
        return optimal_k(ExpansionParams(epsilon_ref, rho), mass).k_star

    samples = np.geomspace(rho_lo, rho_hi, MONOTONE_SAMPLES)
    ks = [k_at(r) for r in samples]
    _require_monotone(ks, "optimal k(rho)")
    sign = 1.0 if ks[-1] > ks[0] else -1.0
    k_lo, k_hi = sorted((ks[0], ks[-1]))
    if not k_lo <= k_observed <= k_hi:
        raise BracketError(
            f"k_observed={k_observed:.6g} outside optimal-k range [{k_lo:.6g}, {k_hi:.6g}] "
            f"of rho bracket [{rho_lo:g}, {rho_hi:g}]")

    def g(log_rho: float) -> float:
        return sign * (k_at(math.exp(log_rho)) - k_observed)

    tol = math.log1p(RHO_RTOL)
    log_rho, a, b, it = bisect_increasing(
        g, math.log(rho_lo), math.log(rho_hi), lambda a, b: b - a <= tol)
    estimate = math.exp(log_rho)
    residual = abs(k_at(estimate) - k_observed) / k_observed
    return EstimationResult(estimate, (math.exp(a), math.exp(b)), residual, it)


def s_max(epsilon: float) -> float:
    """Maximum achievable fermionic entropy for volume parameter ``epsilon``."""
    return max_entanglement(ExpansionParams(epsilon, 1.0)).s_max


def epsilon_lower_bound(s_observed: float) -> EstimationResult:
    """Smallest eps with S_max(eps) = ``s_observed``.

    Since S_max is increasing in eps and the entropy of the optimal mode
    never exceeds S_max, any eps compatible with the observation is at least
    the returned value.
    """
    s_observed = float(s_observed)
    if not 0.0 <= s_observed < 1.0:
        raise ValueError(f"observed entropy must lie in [0, 1), got {s_observed!r}")
    if s_observed == 0.0:
        return EstimationResult(0.0, (0.0, 0.0), 0.0, 0)

    cache: dict[float, float] = {}

    def smax_log(log_eps: float) -> float:
        if log_eps not in cache:
            cache[log_eps] = s_max(math.exp(log_eps))
        return cache[log_eps]

    lo = hi = 0.0
    if smax_log(0.0) < s_observed:
        while smax_log(hi) < s_observed:
            lo = hi
            hi += math.log(10.0)
            if hi > math.log(EPS_UPPER_LIMIT):
                raise BracketError(
                    f"S_max stays below {s_observed:g} up to eps = {EPS_UPPER_LIMIT:g}")
    else:
        while smax_log(lo) >= s_observed:
            hi = lo
            lo -= math.log(10.0)
            if lo < math.log(EPS_LOWER_LIMIT):
                return EstimationResult(EPS_LOWER_LIMIT, (0.0, EPS_LOWER_LIMIT), 0.0, 0)

    samples = np.linspace(lo, hi, MONOTONE_SAMPLES)
    _require_monotone([smax_log(u) for u in samples], "S_max(eps)")

    tol = math.log1p(EPS_RTOL)
    log_eps, a, b, it = bisect_increasing(
        lambda u: smax_log(u) - s_observed, lo, hi, lambda a, b: b - a <= tol)
    eps = math.exp(log_eps)
    return EstimationResult(eps, (math.exp(a), math.exp(b)), abs(s_max(eps) - s_observed), it)
