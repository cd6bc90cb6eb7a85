"""Spectral zeta values and zeta-regularized determinants D+-(lambda).

D+- are built as Hadamard products over the computed levels: genus 0 for
N > 2, genus 1 with the exp(Z(1) lambda) prefactor for N = 1.  N = 2 uses its
Gamma-function closed form.  Products are accumulated as exp(sum log1p), so no
complex logarithm of the result is ever needed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import rgamma

from .constants import dynamical_constants
from .spectrum import Parity, ParitySpectrum, _first_label_at_or_above

__all__ = [
    "PoleError",
    "RadiusError",
    "PrecisionWarning",
    "SpectralZeta",
    "DeterminantValue",
    "TaylorSeries",
    "zeta_value",
    "zeta_prime_zero",
    "det_parity",
    "det_value",
    "validated_radius",
    "log_det_taylor",
    "harmonic_det",
    "asymptotic_a0",
    "asymptotic_check",
    "stokes_multiplier",
]


class PoleError(ValueError):
    """Z(s) evaluated at its simple pole s = mu."""


class RadiusError(ValueError):
    """|lambda| lies outside the validated accuracy radius of the product."""


class PrecisionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SpectralZeta:
    parity: Parity
    s: float
    value: float
    regularized: bool


@dataclass(frozen=True)
class DeterminantValue:
    lam: complex
    d_plus: complex
    d_minus: complex
    d_full: complex
    genus: int


def zeta_value(spec: ParitySpectrum, s: float) -> SpectralZeta:
    """Z(s) = sum* lambda_k^(-s) for one parity, valid for s > -mu.

    Stored levels are summed directly; the pinned tail is summed in closed
    form.  For s <= mu the tail value is the counterterm-regularized one.
    """
    c = spec.constants
    s = float(s)
    if not s > -c.mu:
        raise ValueError(f"zeta_value needs s > -mu = {-c.mu:g}, got {s:g}")
    if math.isclose(s, c.mu, rel_tol=0, abs_tol=1e-12):
        raise PoleError(f"Z(s) has a simple pole at s = mu = {c.mu:g}")
    key = ("zeta", s)
    if key not in spec._cache:
        head = math.fsum(spec.levels ** (-s))
        tail = spec.tail_power_sum(s, spec.K)
        value = head + tail
        scale = max(abs(head), abs(tail))
        # a vanishing exact value (e.g. Z+(1) at N = 1) is not a loss of precision
        if scale / max(abs(value), 1e-6) > 1e8:
            warnings.warn(
                f"Z({s:g}) lost more than 8 digits to cancellation", PrecisionWarning, stacklevel=2
            )
        spec._cache[key] = value
    return SpectralZeta(parity=spec.parity, s=s, value=spec._cache[key], regularized=s <= c.mu)


def zeta_prime_zero(spec: ParitySpectrum) -> float:
    """Z'(0) = -sum* log lambda_k; the determinant at lambda = 0 is exp(-Z'(0))."""
    key = ("zeta_prime0",)
    if key not in spec._cache:
        spec._cache[key] = -math.fsum(np.log(spec.levels)) - spec.tail_log_sum(spec.K)
    return spec._cache[key]


def validated_radius(spec: ParitySpectrum) -> float:
    """|lambda| bound inside which products are certified: lambda_{K/2}."""
    if spec.N == 2:
        return math.inf
    return spec.level(_first_label_at_or_above(spec.K // 2, spec.parity))


def harmonic_det(parity: Parity | str, lam) -> np.ndarray | complex:
    """Closed-form N = 2 determinant 2^(+-1/2) sqrt(2 pi) 2^(-lam/2) / Gamma((2 -+ 1 + lam)/4)."""
    parity = Parity(parity)
    z = np.asarray(lam, dtype=complex)
    sgn = parity.sign
    # rgamma rather than exp(-loggamma) so the zeros come out exactly
    out = np.exp(sgn * 0.5 * math.log(2) + 0.5 * math.log(2 * math.pi) - z * math.log(2) / 2) * rgamma((2 - sgn + z) / 4)
    return complex(out) if out.ndim == 0 else out


def _log_det(spec: ParitySpectrum, z: np.ndarray) -> np.ndarray:
    """log D(z) for one parity, vectorized; caller handles the radius check."""
    cache = spec._cache
    if ("det_levels",) not in cache:
        cache[("det_levels",)] = spec.levels_through(spec.horizon)
    lv = cache[("det_levels",)]
    T = spec.tail_moments()
    genus = 1 if spec.constants.mu > 1 else 0
    w = z[:, None] / lv[None, :]
    with np.errstate(divide="ignore"):
        terms = np.log1p(w)
    if genus:
        terms = terms - w
    out = -zeta_prime_zero(spec) + terms.sum(axis=1)
    m = np.arange(1, T.size + 1)
    coef = (-1.0) ** (m + 1) * T / m
    if genus:
        out = out + zeta_value(spec, 1.0).value * z
        coef[0] = 0.0
    out = out + (z[:, None] ** m * coef).sum(axis=1)
    return out


def det_parity(spec: ParitySpectrum, lam, check_radius: bool = True):
    """D+-(lam) for one parity sector; accepts scalars or arrays of complex lam."""
    z = np.atleast_1d(np.asarray(lam, dtype=complex))
    if spec.N == 2:
        out = np.atleast_1d(harmonic_det(spec.parity, z))
    else:
        if check_radius:
            r = validated_radius(spec)
            if z.size and np.max(np.abs(z)) > r * (1 + 1e-12):
                raise RadiusError(
                    f"|lambda| = {np.max(np.abs(z)):.6g} exceeds the validated radius "
                    f"lambda_(K/2) = {r:.6g} (K = {spec.K})"
                )
        out = np.exp(_log_det(spec, z))
    return complex(out[0]) if np.ndim(lam) == 0 else out


def _check_pair(spec_even: ParitySpectrum, spec_odd: ParitySpectrum) -> int:
    if spec_even.parity is not Parity.EVEN or spec_odd.parity is not Parity.ODD:
        raise ValueError("expected (even, odd) spectra")
    if spec_even.N != spec_odd.N:
        raise ValueError("spectra of different degrees")
    return spec_even.N


def det_value(spec_even: ParitySpectrum, spec_odd: ParitySpectrum, lam: complex) -> DeterminantValue:
    N = _check_pair(spec_even, spec_odd)
    dp = det_parity(spec_even, complex(lam))
    dm = det_parity(spec_odd, complex(lam))
    return DeterminantValue(
        lam=complex(lam), d_plus=dp, d_minus=dm, d_full=dp * dm, genus=1 if N == 1 else 0
    )


@dataclass(frozen=True)
class TaylorSeries:
    """Coefficients c_n of log D+- = sum c_n lam^n, n = 0..n_max."""

    plus: np.ndarray
    minus: np.ndarray

    def evaluate(self, lam) -> tuple[complex, complex]:
        z = complex(lam)
        pw = z ** np.arange(self.plus.size)
        return complex(np.exp(np.dot(self.plus, pw))), complex(np.exp(np.dot(self.minus, pw)))

    def truncation_bound(self, lam, lambda0: float) -> float:
        """Bound on the omitted part of log D for |lam| < lambda0.

        |Z(n)| <= Z(2) lambda0^(2-n) for n >= 2, so the remainder is bounded
        by a geometric series in |lam| / lambda0.
        """
        z = abs(complex(lam))
        q = z / lambda0
        if q >= 1:
            return math.inf
        n = self.plus.size
        z2 = max(abs(self.plus[2]), abs(self.minus[2])) * 2 if n > 2 else 1.0
        return z2 * lambda0**2 * q**n / (n * (1 - q))


def log_det_taylor(spec_even: ParitySpectrum, spec_odd: ParitySpectrum, n_max: int) -> TaylorSeries:
    """Coefficients -Z'(0) and -Z(n)(-1)^n / n of log D+- around lambda = 0."""
    N = _check_pair(spec_even, spec_odd)
    if N == 2:
        raise ValueError("the Taylor form of log D does not exist at N = 2 (Z(1) is infinite)")
    if not 1 <= n_max <= 12:
        raise ValueError("n_max must lie in 1..12")

    def coeffs(spec):
        out = [-zeta_prime_zero(spec)]
        out += [-zeta_value(spec, n).value * (-1) ** n / n for n in range(1, n_max + 1)]
        return np.array(out)

    return TaylorSeries(plus=coeffs(spec_even), minus=coeffs(spec_odd))


def asymptotic_a0(N: int) -> float:
    a0 = dynamical_constants(N).a0
    if a0 is None:
        raise ValueError("a0 is undefined at N = 2 (sin pi mu = 0)")
    return a0


def asymptotic_check(spec_even: ParitySpectrum, spec_odd: ParitySpectrum, lambda_large: float) -> float:
    """|log D(lam) / (a0 lam^mu) - 1| for the full determinant at real lam >= 20."""
    N = _check_pair(spec_even, spec_odd)
    if not lambda_large >= 20:
        raise ValueError("asymptotic_check expects lambda >= 20")
    c = dynamical_constants(N)
    a0 = asymptotic_a0(N)
    lam = float(lambda_large)
    z = np.array([lam], dtype=complex)
    for spec in (spec_even, spec_odd):
        if lam > validated_radius(spec):
            raise RadiusError(f"lambda = {lam:g} exceeds the validated radius {validated_radius(spec):.6g}")
    log_d = float((_log_det(spec_even, z) + _log_det(spec_odd, z))[0].real)
    return abs(log_d / (a0 * lam**c.mu) - 1)


def stokes_multiplier(spec_even: ParitySpectrum, spec_odd: ParitySpectrum, lam, shift: int = 0):
    """C_shift(lam) = C_0(e^{i shift phi} lam), with
    C_0 = (2i)^-1 (e^{i phi/2} D+(lam) D-(e^{2i phi} lam) - e^{-i phi/2} D+(e^{2i phi} lam) D-(lam)).
    """
    N = _check_pair(spec_even, spec_odd)
    if N == 2:
        raise ValueError("the Stokes multiplier formula requires N != 2")
    phi = dynamical_constants(N).phi
    z = np.asarray(lam, dtype=complex) * np.exp(1j * shift * phi)
    r2 = np.exp(2j * phi)
    out = (
        np.exp(0.5j * phi) * det_parity(spec_even, z) * det_parity(spec_odd, r2 * z)
        - np.exp(-0.5j * phi) * det_parity(spec_even, r2 * z) * det_parity(spec_odd, z)
    ) / 2j
    return complex(out) if np.ndim(out) == 0 else out
