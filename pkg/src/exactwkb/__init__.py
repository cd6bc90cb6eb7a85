"""Exact-WKB spectra, spectral determinants and their identities for -d^2/dq^2 + |q|^N."""

__version__ = "0.1.0"

from .constants import DualityReport, DynamicalConstants, duality_check, dynamical_constants
from .determinant import (
    DeterminantValue,
    SpectralZeta,
    asymptotic_a0,
    asymptotic_check,
    det_parity,
    det_value,
    log_det_taylor,
    stokes_multiplier,
    zeta_prime_zero,
    zeta_value,
)
from .identities import IdentityReport, sum_rule_report, verify_all, zeta_table
from .special import airy, airy_zero, gamma, log_gamma
from .spectrum import (
    ConvergenceStats,
    Parity,
    ParitySpectrum,
    arg_det,
    iterate_spectrum,
    semiclassical_level,
    sigma,
    solve_level,
    subtended_angle,
)
from .variational import RitzResult, build_hamiltonian, matrix_element_qN, ritz_spectrum

__all__ = [
    "__version__",
    "DualityReport",
    "DynamicalConstants",
    "duality_check",
    "dynamical_constants",
    "DeterminantValue",
    "SpectralZeta",
    "asymptotic_a0",
    "asymptotic_check",
    "det_parity",
    "det_value",
    "log_det_taylor",
    "stokes_multiplier",
    "zeta_prime_zero",
    "zeta_value",
    "IdentityReport",
    "sum_rule_report",
    "verify_all",
    "zeta_table",
    "airy",
    "airy_zero",
    "gamma",
    "log_gamma",
    "ConvergenceStats",
    "Parity",
    "ParitySpectrum",
    "arg_det",
    "iterate_spectrum",
    "semiclassical_level",
    "sigma",
    "solve_level",
    "subtended_angle",
    "RitzResult",
    "build_hamiltonian",
    "matrix_element_qN",
    "ritz_spectrum",
]
