"""Entanglement of field modes created by a 2-D tanh-profile expanding universe."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source checkout
    __version__ = "0.1.0"

from .bogoliubov import (
    GammaSq,
    Statistics,
    gamma_sq,
    gamma_sq_boson,
    gamma_sq_boson_exact,
    gamma_sq_fermion,
    log_abs_sinh,
    log_cosh,
)
from .entanglement import (
    DomainError,
    EntropySample,
    ReducedState,
    boson_entropy,
    entropy_boson,
    entropy_boson_bruteforce,
    entropy_fermion,
    entropy_sample,
    fermion_entropy,
    reduced_state,
)
from .estimation import (
    BracketError,
    EstimationError,
    EstimationResult,
    FlatEntropyError,
    MonotonicityError,
    OptimalMode,
    epsilon_lower_bound,
    estimate_rho,
    max_entanglement,
    optimal_k,
)
from .modeevolution import BogoliubovPair, Branch, ModeTrajectory, integrate_mode, match_out, oracle_gamma_sq
from .spectrum import ExpansionParams, ModeParams, Spectrum, scale_factor, scale_factor_derivative, spectrum
