"""Dynamical constants of the homogeneous oscillators -d^2/dq^2 + |q|^N."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .special import log_gamma

__all__ = [
    "DynamicalConstants",
    "DualityReport",
    "dynamical_constants",
    "duality_check",
]


@dataclass(frozen=True)
class DynamicalConstants:
    """Constants governing the spectrum of one degree N.

    ``a0`` is ``None`` at N = 2, where sin(pi*mu) vanishes and the leading
    asymptotic coefficient of log D does not exist.
    """

    N: int
    mu: float
    phi: float
    L: int
    b0: float
    a0: Optional[float]
    kappa: float

    @property
    def mu_exact(self) -> Fraction:
        return Fraction(self.N + 2, 2 * self.N)

    @property
    def kappa_exact(self) -> Fraction:
        return Fraction(self.N - 2, self.N + 2)

    @property
    def is_odd(self) -> bool:
        return self.N % 2 == 1

    @property
    def cocycle_total(self) -> float:
        """L*phi/4: pi/2 for even N, pi for odd N."""
        return self.L * self.phi / 4.0

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "mu": self.mu,
            "phi": self.phi,
            "L": self.L,
            "b0": self.b0,
            "a0": self.a0,
            "kappa": self.kappa,
        }


def _check_degree(N) -> int:
    if isinstance(N, bool) or int(N) != N or N < 1:
        raise ValueError(f"degree N must be a positive integer, got {N!r}")
    return int(N)


def dynamical_constants(N: int) -> DynamicalConstants:
    N = _check_degree(N)
    mu = (N + 2) / (2 * N)
    phi = 4 * math.pi / (N + 2)
    L = N // 2 + 1 if N % 2 == 0 else N + 2
    b0 = (2 * math.sqrt(math.pi) / N) * math.exp(
        log_gamma(1.0 / N) - log_gamma(1.5 + 1.0 / N)
    )
    a0 = None if N == 2 else b0 / (2 * math.sin(math.pi * mu))
    kappa = (N - 2) / (N + 2)
    return DynamicalConstants(N=N, mu=mu, phi=phi, L=L, b0=b0, a0=a0, kappa=kappa)


@dataclass(frozen=True)
class DualityReport:
    N: int
    dual: Optional[int]
    angles_sum_to_2pi: bool = False
    inverse_orders_sum_to_2: bool = False
    same_symmetry_order: bool = False
    opposite_kappa: bool = False
    message: str = ""

    @property
    def holds(self) -> bool:
        return self.dual is not None and all(
            (
                self.angles_sum_to_2pi,
                self.inverse_orders_sum_to_2,
                self.same_symmetry_order,
                self.opposite_kappa,
            )
        )


def duality_check(N: int, rtol: float = 1e-14) -> DualityReport:
    """Pair N with N' = 4/N and confirm the four duality relations.

    Only N in {1, 2, 4} admit an integer dual; other degrees yield a report
    with ``dual=None``.
    """
    N = _check_degree(N)
    if 4 % N != 0:
        return DualityReport(N=N, dual=None, message=f"no integer dual: 4/{N} is not an integer")
    c = dynamical_constants(N)
    d = dynamical_constants(4 // N)

    def close(a, b):
        return math.isclose(a, b, rel_tol=rtol, abs_tol=rtol)

    return DualityReport(
        N=N,
        dual=d.N,
        angles_sum_to_2pi=close(c.phi + d.phi, 2 * math.pi),
        inverse_orders_sum_to_2=close(1 / c.mu + 1 / d.mu, 2.0),
        same_symmetry_order=c.L == d.L,
        opposite_kappa=close(c.kappa, -d.kappa),
    )
