"""Residual checks for the functional relations and sum rules of D+-.

Every check returns an IdentityReport.  Relative residuals divide by the
largest term entering the identity at that point (at least 1), since the
determinants grow quickly off the origin and the identities are cancellations
between such terms.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .constants import dynamical_constants
from .determinant import (
    det_parity,
    stokes_multiplier,
    zeta_prime_zero,
    zeta_value,
)
from .special import RHO, airy, log_gamma
from .spectrum import ParitySpectrum

__all__ = [
    "IdentityReport",
    "ZetaTable",
    "MissingZetaError",
    "default_grid",
    "wronskian_residual",
    "airy_wronskian_residual",
    "linear_system_determinant",
    "linear_system_prefactor",
    "pairing_residual",
    "dependence_residual",
    "airy_product_agreement",
    "cocycle_polynomial_residual",
    "stokes_equation_residual",
    "stokes_determinant_residual",
    "zeta_table",
    "sum_rule_report",
    "taylor_rank_residuals",
    "lhs_weights",
    "lhs_weights_recur",
    "verify_all",
    "DEFAULT_THRESHOLD",
]

DEFAULT_THRESHOLD = 1e-5
J = cmath.exp(2j * math.pi / 3)

Spectra = tuple[ParitySpectrum, ParitySpectrum]


@dataclass(frozen=True)
class IdentityReport:
    identity_id: str
    N: int
    sample_points: tuple[complex, ...]
    max_abs_residual: float
    max_rel_residual: float
    passed: bool
    threshold: float = DEFAULT_THRESHOLD
    skipped_points: tuple[complex, ...] = ()
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "identity_id": self.identity_id,
            "N": self.N,
            "sample_points": [[z.real, z.imag] for z in self.sample_points],
            "max_abs_residual": self.max_abs_residual,
            "max_rel_residual": self.max_rel_residual,
            "threshold": self.threshold,
            "passed": self.passed,
            "skipped_points": [[z.real, z.imag] for z in self.skipped_points],
            "note": self.note,
        }


def _report(identity_id, N, points, residual, scale, threshold, skipped=(), note="") -> IdentityReport:
    res = np.abs(np.atleast_1d(np.asarray(residual, dtype=complex)))
    sc = np.maximum(np.atleast_1d(np.asarray(scale, dtype=float)), 1.0)
    if res.size == 0:
        max_abs = max_rel = float("nan")
        passed = False
    else:
        max_abs = float(np.max(res))
        max_rel = float(np.max(res / sc))
        passed = bool(max_rel <= threshold)
    return IdentityReport(
        identity_id=identity_id,
        N=N,
        sample_points=tuple(complex(z) for z in np.atleast_1d(points)),
        max_abs_residual=max_abs,
        max_rel_residual=max_rel,
        passed=passed,
        threshold=threshold,
        skipped_points=tuple(complex(z) for z in skipped),
        note=note,
    )


def _magnitude(*terms) -> np.ndarray:
    return np.max(np.abs(np.vstack([np.atleast_1d(t) for t in terms])), axis=0)


def default_grid(spectra: Spectra, n_real: int = 24, n_circle: int = 8) -> np.ndarray:
    """Real points on [0, lambda_4] plus points on the unit circle."""
    even, _ = spectra
    top = even.level(4) if even.K > 4 else even.levels[-1]
    circle = np.exp(2j * math.pi * (np.arange(n_circle) + 0.5) / n_circle)
    return np.concatenate([np.linspace(0.0, top, n_real).astype(complex), circle])


def _grid(spectra, grid):
    return default_grid(spectra) if grid is None else np.atleast_1d(np.asarray(grid, dtype=complex))


def _shifted(spectra: Spectra, lam: np.ndarray, phi: float):
    """Return D(l) giving (D+_l, D-_l) at e^{i l phi} lam."""
    even, odd = spectra

    def D(l):
        z = lam * cmath.exp(1j * l * phi)
        return det_parity(even, z), det_parity(odd, z)

    return D


def wronskian_residual(
    N: int,
    spectra: Spectra,
    grid=None,
    shifts: Iterable[int] | None = None,
    threshold: float = DEFAULT_THRESHOLD,
) -> IdentityReport:
    """e^{i phi/4} D+_l D-_{l+1} - e^{-i phi/4} D+_{l+1} D-_l - 2i, for each shift l.

    Default shifts are all l = 0..L-1.
    """
    c = dynamical_constants(N)
    if N == 2:
        raise ValueError("the Wronskian-type relation requires N != 2")
    lam = _grid(spectra, grid)
    D = _shifted(spectra, lam, c.phi)
    shifts = range(c.L) if shifts is None else list(shifts)
    res, scale = [], []
    for l in shifts:
        (p0, m0), (p1, m1) = D(l), D(l + 1)
        a = cmath.exp(0.25j * c.phi) * p0 * m1
        b = cmath.exp(-0.25j * c.phi) * p1 * m0
        res.append(a - b - 2j)
        scale.append(_magnitude(a, b))
    return _report(
        "wronskian",
        N,
        lam,
        np.concatenate(res),
        np.concatenate(scale),
        threshold,
        note=f"shifts {list(shifts)}",
    )


def airy_wronskian_residual(grid=None, threshold: float = 1e-9) -> IdentityReport:
    """W[Ai(.), Ai(j^2 .)] - e^{i pi/6} / (2 pi) on the Airy oracle."""
    z = np.linspace(-5, 5, 21).astype(complex) if grid is None else np.atleast_1d(np.asarray(grid, dtype=complex))
    res, scale = [], []
    for x in z:
        a, b = airy(x), airy(J * J * x)
        t1, t2 = a.ai * J * J * b.ai_prime, a.ai_prime * b.ai
        res.append(t1 - t2 - cmath.exp(1j * math.pi / 6) / (2 * math.pi))
        scale.append(max(abs(t1), abs(t2)))
    return _report("airy-wronskian", 1, z, res, scale, threshold)


def linear_system_prefactor(N: int) -> float:
    """sin(3 phi / 4): the factor multiplying 2i D+_0 D+_1 D+_2 in the system determinant."""
    return math.sin(3 * dynamical_constants(N).phi / 4)


def linear_system_determinant(N: int, spectra: Spectra, lam: complex) -> complex:
    """Determinant of the three shifted Wronskian equations, linear in D-_l.

    Computed numerically from the 3x3 coefficient matrix; it should equal
    2i sin(3 phi/4) D+_0 D+_1 D+_2, which vanishes identically for N = 1.
    """
    c = dynamical_constants(N)
    if c.L != 3:
        raise ValueError(f"the linear system has size 3 only for L = 3 (N in {{1, 4}}), got N = {N}")
    D = _shifted(spectra, np.array([complex(lam)]), c.phi)
    p = [D(l)[0][0] for l in range(3)]
    a, b = cmath.exp(-0.25j * c.phi), cmath.exp(0.25j * c.phi)
    # rows: shifted equations l = 1, 2, 0; columns: D-_0, D-_1, D-_2
    M = np.array(
        [
            [0, -a * p[2], b * p[1]],
            [b * p[2], 0, -a * p[0]],
            [-a * p[1], b * p[0], 0],
        ],
        dtype=complex,
    )
    return complex(np.linalg.det(M))


def pairing_residual(
    N: int, spectra: Spectra, grid=None, threshold: float = DEFAULT_THRESHOLD
) -> IdentityReport:
    """Quartic pairing: each parity's determinant as a rational function of the other's."""
    if N != 4:
        raise ValueError("the pairing formulas hold for N = 4 only")
    c = dynamical_constants(N)
    lam = _grid(spectra, grid)
    D = _shifted(spectra, lam, c.phi)
    (p0, m0), (p1, m1), (p2, m2) = D(0), D(1), D(2)
    res, scale, skipped = [], [], []
    for i in range(lam.size):
        den_p, den_m = p1[i] * p2[i], m1[i] * m2[i]
        if abs(den_p) < 1e-12 or abs(den_m) < 1e-12:
            skipped.append(lam[i])
            continue
        num_p = p0[i] - J * J * p1[i] - J * p2[i]
        num_m = m0[i] - J * m1[i] - J * J * m2[i]
        r1 = m0[i] - num_p / den_p
        r2 = p0[i] - num_m / den_m
        res += [r1, r2]
        scale += [max(abs(m0[i]), abs(num_p / den_p)), max(abs(p0[i]), abs(num_m / den_m))]
    kept = [z for z in lam if z not in skipped]
    return _report("pairing", N, kept, res, scale, threshold, skipped=skipped)


def dependence_residual(
    spectra: Spectra | None = None, grid=None, side: str = "product", threshold: float | None = None
) -> IdentityReport:
    """Three-term linear dependence of the rotated N = 1 determinants.

    side="product" uses the Hadamard products; side="airy" uses the oracle
    Ai(z) + j Ai(jz) + j^2 Ai(j^2 z) and its derivative.
    """
    if side == "airy":
        thr = 1e-9 if threshold is None else threshold
        z = (
            np.linspace(-3, 3, 13).astype(complex)
            if grid is None
            else np.atleast_1d(np.asarray(grid, dtype=complex))
        )
        res, scale = [], []
        for x in z:
            a0, a1, a2 = airy(x), airy(J * x), airy(J * J * x)
            res.append(a0.ai + J * a1.ai + J * J * a2.ai)
            scale.append(max(abs(a0.ai), abs(a1.ai), abs(a2.ai)))
            res.append(a0.ai_prime + J * J * a1.ai_prime + J * a2.ai_prime)
            scale.append(max(abs(a0.ai_prime), abs(a1.ai_prime), abs(a2.ai_prime)))
        return _report("dependence-airy", 1, z, res, scale, thr)
    if side != "product":
        raise ValueError("side must be 'product' or 'airy'")
    if spectra is None:
        raise ValueError("product side needs spectra")
    thr = DEFAULT_THRESHOLD if threshold is None else threshold
    c = dynamical_constants(1)
    lam = (
        np.linspace(-3, 3, 13).astype(complex) if grid is None else np.atleast_1d(np.asarray(grid, dtype=complex))
    )
    D = _shifted(spectra, lam, c.phi)
    (p0, m0), (p1, m1), (p2, m2) = D(0), D(1), D(2)
    r_m = m0 + J * J * m1 + J**4 * m2
    r_p = p0 + J * p1 + J * J * p2
    return _report(
        "dependence-product",
        1,
        lam,
        np.concatenate([r_m, r_p]),
        np.concatenate([_magnitude(m0, m1, m2), _magnitude(p0, p1, p2)]),
        thr,
    )


def airy_product_agreement(spectra: Spectra, grid=None, threshold: float = 1e-4) -> IdentityReport:
    """Absolute gap between product-built D-, D+ and 2 sqrt(pi) Ai, -2 sqrt(pi) Ai'."""
    even, odd = spectra
    if even.N != 1:
        raise ValueError("the Airy comparison applies to N = 1")
    lam = (
        np.linspace(-3, 3, 61).astype(complex) if grid is None else np.atleast_1d(np.asarray(grid, dtype=complex))
    )
    dp, dm = det_parity(even, lam), det_parity(odd, lam)
    vals = [airy(x) for x in lam]
    k = 2 * math.sqrt(math.pi)
    res = np.concatenate(
        [dm - k * np.array([v.ai for v in vals]), dp + k * np.array([v.ai_prime for v in vals])]
    )
    # absolute comparison: the scale is pinned to 1
    return _report("airy-product-agreement", 1, lam, res, np.ones(res.size), threshold)


def _full_rotated(spectra, lam, phi):
    D = _shifted(spectra, lam, phi)
    out = []
    for l in range(3):
        p, m = D(l)
        out.append(p * m)
    return out


def _cocycle_poly(N, D0, D1, D2):
    if N == 4:
        lhs, rhs = D0 * D1 * D2, D0 + D1 + D2 + 2
        return lhs - rhs, _magnitude(lhs, rhs)
    sq = D0 * D0 + D1 * D1 + D2 * D2
    cross = 2 * (D1 * D2 + D2 * D0 + D0 * D1)
    return sq - cross + 4, _magnitude(sq, cross)


def cocycle_polynomial_residual(
    N: int, spectra: Spectra | None, grid=None, side: str = "product", threshold: float = DEFAULT_THRESHOLD
) -> IdentityReport:
    """Branch-free polynomial form of the length-3 cocycle for the full determinant.

    N = 4: D0 D1 D2 - (D0 + D1 + D2 + 2).
    N = 1: D0^2 + D1^2 + D2^2 - 2(D1 D2 + D2 D0 + D0 D1) + 4, either from the
    products or (side="airy") from D = -2 pi (Ai^2)'.
    """
    if N not in (1, 4):
        raise ValueError("the polynomial cocycle forms are available for N in {1, 4}")
    c = dynamical_constants(N)
    if side == "airy":
        if N != 1:
            raise ValueError("the Airy side exists only for N = 1")
        lam = np.linspace(-3, 3, 13).astype(complex) if grid is None else np.atleast_1d(np.asarray(grid, dtype=complex))

        def full(z):
            v = airy(z)
            return -4 * math.pi * v.ai * v.ai_prime

        rot = cmath.exp(1j * c.phi)
        D0, D1, D2 = (np.array([full(z * rot**l) for z in lam]) for l in range(3))
        res, scale = _cocycle_poly(N, D0, D1, D2)
        return _report("cocycle-polynomial-airy", N, lam, res, scale, threshold)
    if side != "product":
        raise ValueError("side must be 'product' or 'airy'")
    lam = _grid(spectra, grid)
    D0, D1, D2 = _full_rotated(spectra, lam, c.phi)
    res, scale = _cocycle_poly(N, D0, D1, D2)
    return _report("cocycle-polynomial", N, lam, res, scale, threshold)


def stokes_equation_residual(
    N: int, spectra: Spectra, grid=None, threshold: float = DEFAULT_THRESHOLD
) -> IdentityReport:
    """Closed equations of the Stokes multiplier C_l = C(e^{i l phi} .).

    N = 4: C0 C1 C2 = C0 + C1 + C2;  N = 3: C2 C3 - C0 = 1;  N = 1: C = 1.
    """
    even, odd = spectra
    lam = _grid(spectra, grid)

    def C(l):
        return stokes_multiplier(even, odd, lam, shift=l)

    if N == 4:
        c0, c1, c2 = C(0), C(1), C(2)
        lhs, rhs = c0 * c1 * c2, c0 + c1 + c2
        return _report("stokes-equation", N, lam, lhs - rhs, _magnitude(lhs, rhs), threshold)
    if N == 3:
        c0, c2, c3 = C(0), C(2), C(3)
        lhs = c2 * c3
        return _report("stokes-equation", N, lam, lhs - c0 - 1, _magnitude(lhs, c0), threshold)
    if N == 1:
        c0 = C(0)
        return _report("stokes-equation", N, lam, c0 - 1, np.abs(c0), threshold)
    raise ValueError("Stokes equations are checked for N in {1, 3, 4}")


def stokes_determinant_residual(
    spectra: Spectra, grid=None, threshold: float = DEFAULT_THRESHOLD
) -> IdentityReport:
    """Quartic link between full determinant and Stokes multiplier: D0 = C1 C0 - 1."""
    even, odd = spectra
    if even.N != 4:
        raise ValueError("the determinant/Stokes link is checked for N = 4")
    lam = _grid(spectra, grid)
    d0 = det_parity(even, lam) * det_parity(odd, lam)
    prod = stokes_multiplier(even, odd, lam, 1) * stokes_multiplier(even, odd, lam, 0)
    return _report("stokes-determinant", 4, lam, d0 - (prod - 1), _magnitude(d0, prod), threshold)


# -- sum rules ------------------------------------------------------------------


class MissingZetaError(KeyError):
    pass


@dataclass(frozen=True)
class ZetaTable:
    """Spectral zeta values Z+-(n) and Z+-'(0) of one degree."""

    N: int
    plus: Mapping[int, float]
    minus: Mapping[int, float]
    prime_plus: float | None = None
    prime_minus: float | None = None

    def need(self, plus: Sequence[int] = (), minus: Sequence[int] = (), prime: bool = False) -> None:
        missing = [f"Z+({n})" for n in plus if n not in self.plus]
        missing += [f"Z-({n})" for n in minus if n not in self.minus]
        if prime and self.prime_plus is None:
            missing.append("Z+'(0)")
        if prime and self.prime_minus is None:
            missing.append("Z-'(0)")
        if missing:
            raise MissingZetaError("missing zeta values: " + ", ".join(missing))

    def full(self, n: int) -> float:
        return self.plus[n] + self.minus[n]


def zeta_table(spectra: Spectra, n_max: int = 9) -> ZetaTable:
    even, odd = spectra
    return ZetaTable(
        N=even.N,
        plus={n: zeta_value(even, n).value for n in range(1, n_max + 1)},
        minus={n: zeta_value(odd, n).value for n in range(1, n_max + 1)},
        prime_plus=zeta_prime_zero(even),
        prime_minus=zeta_prime_zero(odd),
    )


def lhs_weights(N: int, n: int) -> tuple[float, float]:
    """Weights (sin((n - 1/2) phi/2), -sin((n + 1/2) phi/2)) of Z+(n), Z-(n) at rank n."""
    phi = dynamical_constants(N).phi
    return math.sin((n - 0.5) * phi / 2), -math.sin((n + 0.5) * phi / 2)


def lhs_weights_recur(N: int, n_max: int | None = None, tol: float = 1e-12) -> bool:
    """True when the rank-n weight pair repeats, up to one common sign, after L ranks."""
    L = dynamical_constants(N).L
    n_max = 3 * L if n_max is None else n_max
    for n in range(0, n_max - L + 1):
        a, b = lhs_weights(N, n), lhs_weights(N, n + L)
        same = all(abs(x - y) <= tol for x, y in zip(a, b))
        flipped = all(abs(x + y) <= tol for x, y in zip(a, b))
        if not (same or flipped):
            return False
    return True


def _series_exp(c: np.ndarray) -> np.ndarray:
    """Power-series coefficients of exp(sum c_n x^n), truncated to len(c)."""
    n = c.size
    out = np.zeros(n, dtype=complex)
    out[0] = cmath.exp(c[0])
    for k in range(1, n):
        out[k] = sum(j * c[j] * out[k - j] for j in range(1, k + 1)) / k
    return out


def taylor_rank_residuals(table: ZetaTable, n_max: int | None = None) -> np.ndarray:
    """Taylor coefficients of the Wronskian-type relation minus those of 2i.

    Rank n of this expansion is the rank-n sum rule; every entry should vanish.
    """
    N = table.N
    phi = dynamical_constants(N).phi
    n_max = min(max(table.plus), max(table.minus)) if n_max is None else n_max
    table.need(plus=range(1, n_max + 1), minus=range(1, n_max + 1), prime=True)
    n = np.arange(n_max + 1)

    def logc(zeta, prime):
        out = np.zeros(n_max + 1)
        out[0] = -prime
        for k in range(1, n_max + 1):
            out[k] = -zeta[k] * (-1) ** k / k
        return out

    cp = logc(table.plus, table.prime_plus)
    cm = logc(table.minus, table.prime_minus)
    rot = np.exp(1j * phi * n)
    a = cmath.exp(0.25j * phi) * _series_exp(cp + cm * rot)
    b = cmath.exp(-0.25j * phi) * _series_exp(cp * rot + cm)
    out = a - b
    out[0] -= 2j
    return out


def _closed_forms(N: int) -> tuple[float, float]:
    """Closed forms of Z-'(0) and Z+(1) - Z-(1) in terms of Gamma functions."""
    phi = dynamical_constants(N).phi
    g = phi / (4 * math.pi)
    zp = N * phi / (8 * math.pi) * math.log(N + 2) + 0.5 * math.log(math.pi) - log_gamma(g)
    diff = (
        (2 * math.sqrt(math.pi)) ** -1
        * (2 / (N + 2)) ** (N * phi / (2 * math.pi))
        * math.sin(phi / 4)
        * math.exp(log_gamma(g) + log_gamma(2 * g) + log_gamma(3 * g) - log_gamma(0.5 + 2 * g))
    )
    return zp, diff


def sum_rule_report(table: ZetaTable, threshold: float = 1e-6, closed_form_threshold: float = 1e-5) -> list[IdentityReport]:
    """Residuals of the spectral sum rules available at this degree.

    Always: ranks 0, 1, 2 and the all-rank Taylor check of the Wronskian
    relation, and the Gamma closed forms for Z-'(0) and Z+(1) - Z-(1).
    N = 4 adds the quartic rank-2 and Z(3) reductions; N = 1 adds the Airy
    zero moments, including Z+(3) = 1.
    """
    N = table.N
    if N == 2:
        raise ValueError("the sum rules need N != 2 (Z(1) is infinite)")
    phi = dynamical_constants(N).phi
    rules: list[tuple[str, float, float, float]] = []  # id, residual, scale, threshold

    def add(name, residual, scale=1.0, thr=threshold):
        rules.append((name, residual, scale, thr))

    table.need(plus=(1, 2), minus=(1, 2), prime=True)
    zp1, zm1, zp2, zm2 = table.plus[1], table.minus[1], table.plus[2], table.minus[2]
    s = math.sin
    add("rank-0", table.prime_plus + table.prime_minus - math.log(s(phi / 4)))
    add("rank-1", s(phi / 4) * zp1 - s(3 * phi / 4) * zm1, max(abs(zp1), abs(zm1)))
    rhs2 = s(phi / 4) * (2 * math.cos(phi / 4) * (zp1 - zm1)) ** 2
    add("rank-2", s(3 * phi / 4) * zp2 - s(5 * phi / 4) * zm2 - rhs2, max(abs(zp2), abs(zm2), abs(rhs2)))
    tr = taylor_rank_residuals(table)
    for k, r in enumerate(tr):
        add(f"wronskian-taylor-rank-{k}", abs(r))
    zp, diff = _closed_forms(N)
    add("closed-form-minus-log-det", table.prime_minus - zp, 1.0, closed_form_threshold)
    add("closed-form-z1-difference", (zp1 - zm1) - diff, 1.0, closed_form_threshold)

    if N == 4:
        table.need(plus=(3,), minus=(3,))
        z1, z2, z3 = table.full(1), table.full(2), table.full(3)
        add("quartic-log-det", table.prime_plus + table.prime_minus + math.log(2))
        add("quartic-rank-1", 0.5 * zp1 - zm1)
        add("quartic-rank-2", zp2 - 0.5 * zm2 - 1.5 * (zp1 - zm1) ** 2)
        add("quartic-z3-closure", z3 - (z1**3 / 6 - z1 * z2 / 2), max(abs(z3), abs(z1**3 / 6), abs(z1 * z2 / 2)))
    if N == 1:
        table.need(plus=(3,), minus=(3,))
        z1, z2, z3 = table.full(1), table.full(2), table.full(3)
        add("airy-log-det", table.prime_plus + table.prime_minus + math.log(2 / math.sqrt(3)))
        add("airy-z1-plus", zp1)
        add("airy-z2-minus", zm2 - zm1**2)
        add("airy-z3-closure", z3 - (2.5 * z1**3 - 1.5 * z1 * z2))
        add("airy-z3-mixed", z3 - (zm1**3 - 1.5 * zm1 * zp2))
        add("airy-log-ratio", table.prime_plus - table.prime_minus + math.log(RHO))
        add("airy-z1-minus", zm1 + RHO)
        add("airy-z2-plus", zp2 - 1 / RHO)
        add("airy-z3-plus", table.plus[3] - 1.0)
        add("airy-z3-minus", table.minus[3] - (-RHO**3 + 0.5))

    return [
        _report(f"sum-rule:{name}", N, [], [res], [scale], thr) for name, res, scale, thr in rules
    ]


# -- everything applicable --------------------------------------------------------


def verify_all(N: int, spectra: Spectra, grid=None) -> list[IdentityReport]:
    """Run every identity that applies at degree N (N != 2)."""
    if N == 2:
        raise ValueError("identity checks are defined for N != 2")
    reports = [wronskian_residual(N, spectra, grid)]
    if N == 4:
        reports.append(pairing_residual(N, spectra, grid))
        reports.append(cocycle_polynomial_residual(N, spectra, grid))
        reports.append(stokes_determinant_residual(spectra, grid))
    if N == 1:
        reports.append(airy_wronskian_residual())
        reports.append(dependence_residual(spectra, side="product"))
        reports.append(dependence_residual(side="airy"))
        reports.append(cocycle_polynomial_residual(N, spectra, grid))
        reports.append(cocycle_polynomial_residual(N, None, side="airy"))
        reports.append(airy_product_agreement(spectra))
    if N in (1, 3, 4):
        reports.append(stokes_equation_residual(N, spectra, grid))
    reports.extend(sum_rule_report(zeta_table(spectra)))
    return reports
