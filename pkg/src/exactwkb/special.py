"""Gamma, Hurwitz zeta and Airy evaluations.

The Airy routines are written out here (Maclaurin series near the origin,
Poincare asymptotics further out) so that they can serve as an oracle
independent of the spectral machinery for the N = 1 problem.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import mpmath
from scipy.optimize import brentq

__all__ = [
    "AiryMethod",
    "AiryValue",
    "AiryKind",
    "gamma",
    "log_gamma",
    "hurwitz_zeta",
    "airy",
    "airy_zero",
    "AIRY_AI0",
    "AIRY_AIP0",
    "RHO",
    "SERIES_RADIUS",
    "MAX_RADIUS",
]


def log_gamma(x: float) -> float:
    """log Gamma(x) for real x > 0."""
    if not x > 0:
        raise ValueError(f"log_gamma domain error: x = {x!r} must be > 0")
    return math.lgamma(x)


def gamma(x: float) -> float:
    """Gamma(x) for real x > 0.

    Raises OverflowError once Gamma(x) exceeds the double range (x > 171.6).
    """
    if not x > 0:
        raise ValueError(f"gamma domain error: x = {x!r} must be > 0")
    return math.gamma(x)


def hurwitz_zeta(s: float, a: float, derivative: int = 0) -> float:
    """Analytically continued Hurwitz zeta sum_j (j + a)^(-s), or its s-derivative.

    For s < 1 this is the value of the divergent sum regularized by
    subtracting the Euler-Maclaurin counterterms, which is what the spectral
    zeta regularization reduces to on a pure power-law tail.
    """
    return float(mpmath.zeta(s, a, derivative))


# Ai(0), Ai'(0), and rho = -Ai'(0)/Ai(0)
AIRY_AI0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
AIRY_AIP0 = -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0)
RHO = 3.0 ** (5.0 / 6.0) / (2 * math.pi) * math.gamma(2.0 / 3.0) ** 2

SERIES_RADIUS = 6.0
MAX_RADIUS = 40.0

_J = cmath.exp(2j * math.pi / 3)


class AiryMethod(str, enum.Enum):
    SERIES = "series"
    ASYMPTOTIC = "asymptotic"


class AiryKind(str, enum.Enum):
    AI = "Ai"
    AI_PRIME = "AiPrime"


@dataclass(frozen=True)
class AiryValue:
    z: complex
    ai: complex
    ai_prime: complex
    method: AiryMethod


def _airy_series(z: complex) -> tuple[complex, complex]:
    # Ai = Ai(0) f - |Ai'(0)| g with f, g the two Maclaurin solutions.
    z3 = z * z * z
    t, tp = 1.0 + 0j, 0j  # current f and f' terms
    u, up = z, 1.0 + 0j  # current g and g' terms
    f, fp, g, gp = t, tp, u, up
    for k in range(1, 400):
        t = t * z3 / ((3 * k - 1) * (3 * k))
        tp = z * z / 2 if k == 1 else tp * z3 / ((3 * k - 1) * (3 * k - 3))
        u = u * z3 / ((3 * k) * (3 * k + 1))
        up = up * z3 / ((3 * k) * (3 * k - 2))
        f += t
        fp += tp
        g += u
        gp += up
        scale = max(abs(f), abs(g), abs(fp), abs(gp), 1.0)
        if max(abs(t), abs(tp), abs(u), abs(up)) < 1e-18 * scale and k > 3:
            break
    c1, c2 = AIRY_AI0, -AIRY_AIP0
    return c1 * f - c2 * g, c1 * fp - c2 * gp


def _airy_asymptotic_sector(z: complex) -> tuple[complex, complex]:
    """Poincare expansion; accurate for |arg z| <= 2 pi / 3 and large |z|."""
    zeta = (2.0 / 3.0) * z ** 1.5
    s_ai = 1.0 + 0j
    s_aip = 1.0 + 0j
    u = 1.0
    best = math.inf
    for k in range(1, 200):
        u *= (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        v = -(6 * k + 1) / (6 * k - 1) * u
        term = (-1) ** k * u / zeta**k
        size = abs(term)
        if size > best:
            break  # optimal truncation at the smallest term
        best = size
        s_ai += term
        s_aip += (-1) ** k * v / zeta**k
        if size < 1e-17:
            break
    pref = cmath.exp(-zeta) / (2 * math.sqrt(math.pi))
    z4 = z**0.25
    return pref / z4 * s_ai, -pref * z4 * s_aip


def _airy_asymptotic(z: complex) -> tuple[complex, complex]:
    if abs(cmath.phase(z)) <= 2 * math.pi / 3:
        return _airy_asymptotic_sector(z)
    # Ai(z) + j Ai(jz) + j^2 Ai(j^2 z) = 0 moves both pieces inside the sector.
    a1, d1 = _airy_asymptotic_sector(_J * z)
    a2, d2 = _airy_asymptotic_sector(_J * _J * z)
    ai = -_J * a1 - _J * _J * a2
    aip = -_J * _J * d1 - _J * d2
    return ai, aip


def airy(z: complex) -> AiryValue:
    """Ai(z) and Ai'(z) for complex |z| <= 40.

    Series for |z| <= 6, asymptotic expansion beyond.
    """
    z = complex(z)
    r = abs(z)
    if not r <= MAX_RADIUS:
        raise ValueError(f"airy range error: |z| = {r:g} exceeds {MAX_RADIUS:g}")
    if r <= SERIES_RADIUS:
        ai, aip = _airy_series(z)
        method = AiryMethod.SERIES
    else:
        ai, aip = _airy_asymptotic(z)
        method = AiryMethod.ASYMPTOTIC
    return AiryValue(z=z, ai=ai, ai_prime=aip, method=method)


def airy_series(z: complex) -> AiryValue:
    """Series branch only (no range switch); used for overlap cross-checks."""
    ai, aip = _airy_series(complex(z))
    return AiryValue(z=complex(z), ai=ai, ai_prime=aip, method=AiryMethod.SERIES)


def airy_asymptotic(z: complex) -> AiryValue:
    """Asymptotic branch only (no range switch)."""
    ai, aip = _airy_asymptotic(complex(z))
    return AiryValue(z=complex(z), ai=ai, ai_prime=aip, method=AiryMethod.ASYMPTOTIC)


def _bohr_sommerfeld_linear(k: float) -> float:
    # (8/3) x^(3/2) = 2 pi (k + 1/2)
    return (3 * math.pi * (k + 0.5) / 4) ** (2.0 / 3.0)


def airy_zero(kind: AiryKind | str, s: int, xtol: float = 1e-13) -> float:
    """Magnitude of the s-th negative zero of Ai (kind "Ai") or Ai' ("AiPrime").

    Bracketed by the linear-potential Bohr-Sommerfeld estimate plus or minus
    half the local level spacing; the zero of Ai is the odd level
    k = 2s - 1 and the zero of Ai' the even level k = 2s - 2.
    """
    kind = AiryKind(kind)
    if int(s) != s or s < 1:
        raise ValueError(f"zero index must be a positive integer, got {s!r}")
    k = 2 * s - 1 if kind is AiryKind.AI else 2 * s - 2
    guess = _bohr_sommerfeld_linear(k)
    lo = guess - 0.5 * (guess - (_bohr_sommerfeld_linear(k - 1) if k > 0 else 0.0))
    hi = guess + 0.5 * (_bohr_sommerfeld_linear(k + 1) - guess)
    if kind is AiryKind.AI:
        def fn(x):
            return airy(-x).ai.real
    else:
        def fn(x):
            return airy(-x).ai_prime.real
    flo, fhi = fn(lo), fn(hi)
    if flo * fhi > 0:
        raise RuntimeError(
            f"airy_zero bracket [{lo:.6g}, {hi:.6g}] does not straddle a sign change "
            f"for {kind.value} zero {s}"
        )
    return brentq(fn, lo, hi, xtol=xtol, rtol=1e-15, maxiter=200)
