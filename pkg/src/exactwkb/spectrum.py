"""Exact quantization by self-consistent angle sums.

Each parity sector of -d^2/dq^2 + |q|^N is obtained as the fixed point of

    2 Sigma(lambda_k) = k + 1/2 +/- kappa/2,
    pi Sigma(lambda) = sum_k' arg(lambda_k' - exp(-i phi) lambda),

iterated from the Bohr-Sommerfeld levels.  Levels with label >= K are pinned
to an asymptotic model; beyond a summation horizon K_sum the angle series is
summed in closed form through Hurwitz zeta values, which for mu > 1 (N = 1)
also supplies the counterterm regularization of the divergent angle sum.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .constants import DynamicalConstants, dynamical_constants
from .special import hurwitz_zeta

log = logging.getLogger(__name__)

__all__ = [
    "Parity",
    "ParitySpectrum",
    "ConvergenceStats",
    "HorizonError",
    "BracketError",
    "semiclassical_level",
    "subtended_angle",
    "arg_det",
    "arg_det_truncated",
    "sigma",
    "solve_level",
    "iterate_spectrum",
    "fit_tail_coefficients",
    "quantization_residual",
    "MAX_SWEEPS",
    "DEFAULT_CUTOFF",
]

MAX_SWEEPS = 60
DEFAULT_CUTOFF = 256
# Truncation order of the closed-form tail series in lambda / lambda_{K_sum}.
TAIL_ORDER = 48
# Rounding level of the self-consistency residual 2 Sigma(lambda_k) - target.
RESIDUAL_FLOOR = 1e-11
# The tail series is only trusted while lambda stays well inside the horizon.
HORIZON_RATIO = 0.5


class HorizonError(ValueError):
    """The requested argument lies too close to the summation horizon."""


class BracketError(RuntimeError):
    """A root bracket could not be established for the quantization condition."""


class Parity(str, enum.Enum):
    EVEN = "even"
    ODD = "odd"

    @property
    def first_label(self) -> int:
        return 0 if self is Parity.EVEN else 1

    @property
    def sign(self) -> int:
        return 1 if self is Parity.EVEN else -1

    @classmethod
    def of_label(cls, k: int) -> "Parity":
        return cls.EVEN if k % 2 == 0 else cls.ODD


def _first_label_at_or_above(K: int, parity: Parity) -> int:
    return K if K % 2 == parity.first_label else K + 1


def semiclassical_level(N: int, k) -> np.ndarray | float:
    """Bohr-Sommerfeld level (2 pi (k + 1/2) / b0)^(1/mu)."""
    c = dynamical_constants(N)
    k_arr = np.asarray(k, dtype=float)
    if np.any(k_arr < 0):
        raise ValueError("level label must be >= 0")
    out = (2 * math.pi * (k_arr + 0.5) / c.b0) ** (1.0 / c.mu)
    return float(out) if out.ndim == 0 else out


def subtended_angle(lam, level, phi: float):
    """Principal arg(level - exp(-i phi) lam): the angle of one eigenvalue."""
    z = np.asarray(level) - np.exp(-1j * phi) * np.asarray(lam)
    out = np.angle(z)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class ConvergenceStats:
    iterations: int
    displacement_norms: tuple[float, ...]
    contraction_estimate: float
    refinement_sweeps: tuple[int, ...] = ()

    def as_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "displacement_norms": list(self.displacement_norms),
            "contraction_estimate": self.contraction_estimate,
            "refinement_sweeps": list(self.refinement_sweeps),
        }


@dataclass(frozen=True, eq=False)
class ParitySpectrum:
    """Levels lambda_k (k < K, one parity) plus the asymptotic model beyond K.

    ``tail_coeffs = (e1, e3)`` describe the pinned levels through
    lambda^mu = x + e1/x + e3/x^3 with x = 2 pi (k + 1/2) / b0; both zero
    means plain Bohr-Sommerfeld pins.
    """

    N: int
    parity: Parity
    levels: np.ndarray
    K: int
    tol: float
    converged: bool
    tail_coeffs: tuple[float, float] = (0.0, 0.0)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "parity", Parity(self.parity))
        lv = np.asarray(self.levels, dtype=float)
        lv.setflags(write=False)
        object.__setattr__(self, "levels", lv)
        expected = len(range(self.parity.first_label, self.K, 2))
        if lv.shape != (expected,):
            raise ValueError(f"expected {expected} levels below K={self.K}, got {lv.shape}")
        if lv.size and (lv[0] <= 0 or np.any(np.diff(lv) <= 0)):
            raise ValueError("levels must be positive and strictly increasing")

    @property
    def constants(self) -> DynamicalConstants:
        c = self._cache.get("constants")
        if c is None:
            c = self._cache["constants"] = dynamical_constants(self.N)
        return c

    @property
    def labels(self) -> np.ndarray:
        return np.arange(self.parity.first_label, self.K, 2)

    @property
    def horizon(self) -> int:
        """Summation horizon K_sum (a label) for angle sums and products."""
        return max(8 * self.K, 512)

    @property
    def target_offset(self) -> float:
        return 0.5 + self.parity.sign * self.constants.kappa / 2

    def targets(self, labels=None) -> np.ndarray:
        """Right-hand sides Sigma(lambda_k) = (k + 1/2 +/- kappa/2) / 2."""
        lab = self.labels if labels is None else np.asarray(labels)
        return (lab + self.target_offset) / 2.0

    def pinned(self, labels) -> np.ndarray:
        """Model levels for labels at or beyond K."""
        c = self.constants
        x = 2 * math.pi * (np.asarray(labels, dtype=float) + 0.5) / c.b0
        e1, e3 = self.tail_coeffs
        return (x + e1 / x + e3 / x**3) ** (1.0 / c.mu)

    def level(self, k: int) -> float:
        if k % 2 != self.parity.first_label:
            raise ValueError(f"label {k} has the wrong parity for {self.parity.value}")
        if k < self.K:
            return float(self.levels[(k - self.parity.first_label) // 2])
        return float(self.pinned([k])[0])

    def levels_through(self, k_end: int) -> np.ndarray:
        """All levels of this parity with label < k_end (pins past K)."""
        if k_end <= self.K:
            return np.asarray(self.levels[: len(range(self.parity.first_label, k_end, 2))])
        extra = np.arange(_first_label_at_or_above(self.K, self.parity), k_end, 2)
        return np.concatenate([self.levels, self.pinned(extra)])

    def with_levels(self, levels, **changes) -> "ParitySpectrum":
        kw = dict(
            N=self.N,
            parity=self.parity,
            levels=levels,
            K=self.K,
            tol=self.tol,
            converged=self.converged,
            tail_coeffs=self.tail_coeffs,
        )
        kw.update(changes)
        return ParitySpectrum(**kw)

    # -- closed-form tails -------------------------------------------------

    def tail_power_sum(self, s: float, k_from: int) -> float:
        """Regularized sum over pinned labels k >= k_from of lambda_k^(-s).

        Exact for the pin model up to O(x^-6) corrections; for s <= mu the
        value is the counterterm-regularized (Hurwitz-continued) one.
        """
        key = ("pow", float(s), int(k_from))
        if key in self._cache:
            return self._cache[key]
        c = self.constants
        k0 = _first_label_at_or_above(k_from, self.parity)
        a = (k0 + 0.5) / 2.0
        base = 4 * math.pi / c.b0
        e1, e3 = self.tail_coeffs

        def H(sig):
            return base ** (-sig) * hurwitz_zeta(sig, a)

        sg = s / c.mu
        val = H(sg)
        if e1 or e3:
            val += -sg * e1 * H(sg + 2) + (-sg * e3 + sg * (sg + 1) / 2 * e1 * e1) * H(sg + 4)
        self._cache[key] = val
        return val

    def tail_log_sum(self, k_from: int) -> float:
        """Regularized sum over pinned labels k >= k_from of log lambda_k."""
        key = ("log", int(k_from))
        if key in self._cache:
            return self._cache[key]
        c = self.constants
        k0 = _first_label_at_or_above(k_from, self.parity)
        a = (k0 + 0.5) / 2.0
        base = 4 * math.pi / c.b0
        e1, e3 = self.tail_coeffs
        # sum* log x = -d/dsig [base^-sig zeta(sig, a)] at sig = 0
        d_h0 = -math.log(base) * hurwitz_zeta(0.0, a) + hurwitz_zeta(0.0, a, 1)
        val = -d_h0
        if e1 or e3:
            val += e1 * base**-2 * hurwitz_zeta(2.0, a) + (e3 - e1 * e1 / 2) * base**-4 * hurwitz_zeta(4.0, a)
        val /= c.mu
        self._cache[key] = val
        return val

    def tail_moments(self, k_from: int | None = None, order: int = TAIL_ORDER) -> np.ndarray:
        """T_m = sum over labels >= k_from of lambda_k^(-m), m = 1..order."""
        k_from = self.horizon if k_from is None else k_from
        key = ("moments", int(k_from), order)
        if key not in self._cache:
            self._cache[key] = np.array([self.tail_power_sum(m, k_from) for m in range(1, order + 1)])
        return self._cache[key]

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "parity": self.parity.value,
            "K": self.K,
            "tol": self.tol,
            "converged": self.converged,
            "tail_coeffs": list(self.tail_coeffs),
            "labels": self.labels.tolist(),
            "levels": self.levels.tolist(),
        }


# -- angle sums -------------------------------------------------------------


def _angle_sum(all_levels: np.ndarray, T: np.ndarray, phi: float, lam: np.ndarray):
    """pi Sigma(lam) and its lam-derivative, vectorized over lam."""
    rot = np.exp(-1j * phi)
    z = all_levels[None, :] - rot * lam[:, None]
    val = np.angle(z).sum(axis=1)
    der = np.imag(-rot / z).sum(axis=1)
    m = np.arange(1, T.size + 1)
    # arg(1 - w) = sum_m sin(m phi) (lam / lambda_k)^m / m summed over the tail
    pw = lam[:, None] ** (m - 1)
    coef = np.sin(m * phi) * T
    val = val + (pw * lam[:, None] * coef / m).sum(axis=1)
    der = der + (pw * coef).sum(axis=1)
    return val, der


def _check_horizon(spec: ParitySpectrum, lam: np.ndarray) -> None:
    lim = HORIZON_RATIO * spec.level(_first_label_at_or_above(spec.horizon, spec.parity))
    if lam.size and np.max(np.abs(lam)) > lim:
        raise HorizonError(
            f"|lambda| = {np.max(np.abs(lam)):.6g} too close to the summation horizon "
            f"(limit {lim:.6g} for K_sum = {spec.horizon}); tail estimate would exceed tolerance"
        )


def _arg_det_with_derivative(spec: ParitySpectrum, lam):
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    _check_horizon(spec, lam_arr)
    key = ("angle_levels",)
    all_levels = spec._cache.get(key)
    if all_levels is None:
        all_levels = spec._cache[key] = spec.levels_through(spec.horizon)
    T = spec.tail_moments()
    return _angle_sum(all_levels, T, spec.constants.phi, lam_arr)


def arg_det(spec: ParitySpectrum, lam):
    """Arg D(-exp(-i phi) lam): continuous determination vanishing at lam = 0.

    The angle series runs over stored levels, then pinned levels up to the
    horizon, then a closed-form tail.  For N = 1 the tail's first moment is the
    regularized one, so the result equals the counterterm-subtracted limit.
    """
    if spec.N == 2:
        out = math.pi * np.asarray(lam, dtype=float) / 4.0
        return float(out) if out.ndim == 0 else out
    val, _ = _arg_det_with_derivative(spec, lam)
    return float(val[0]) if np.ndim(lam) == 0 else val


def arg_det_truncated(spec: ParitySpectrum, lam: float, k_cut: int) -> float:
    """Partial angle sum over labels < k_cut minus the power-law counterterm.

    For mu > 1 this is the bracket whose k_cut -> infinity limit defines
    Arg D; for mu < 1 no counterterm is needed and the plain partial sum is
    returned.  Used to cross-check the closed-form tail.
    """
    c = spec.constants
    lv = spec.levels_through(k_cut)
    s = float(np.sum(subtended_angle(lam, lv, c.phi)))
    if c.mu > 1:
        lam_k = spec.level(_first_label_at_or_above(k_cut, spec.parity))
        s -= lam * math.sin(c.phi) * (c.b0 * c.mu / (4 * math.pi)) * lam_k ** (c.mu - 1) / (c.mu - 1)
    return s


def sigma(spec: ParitySpectrum, lam):
    """Sigma(lam) = Arg D(-exp(-i phi) lam) / pi."""
    out = np.asarray(arg_det(spec, lam)) / math.pi
    return float(out) if out.ndim == 0 else out


def sigma_with_derivative(spec: ParitySpectrum, lam):
    if spec.N == 2:
        lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
        return lam_arr / 4.0, np.full_like(lam_arr, 0.25)
    val, der = _arg_det_with_derivative(spec, lam)
    return val / math.pi, der / math.pi


def solve_level(spec: ParitySpectrum, k: int, tol: float | None = None) -> float:
    """Solve Sigma(lambda) = (k + 1/2 +/- kappa/2) / 2 for one label k.

    Bracketed root search; sigma must increase across the bracket.
    """
    if k % 2 != spec.parity.first_label:
        raise ValueError(f"label {k} does not match parity {spec.parity.value}")
    target = float(spec.targets([k])[0])
    if spec.N == 2:
        return 4.0 * target
    tol = spec.tol if tol is None else tol
    guess = spec.level(k)
    lo_k = spec.level(k - 2) if k >= 2 else 0.0
    hi_k = spec.level(k + 2)
    lo = 0.5 * (guess + lo_k)
    hi = 0.5 * (guess + hi_k)

    def g(x):
        return sigma(spec, x) - target

    for _ in range(20):
        if g(lo) <= 0:
            break
        lo *= 0.5
    for _ in range(20):
        if g(hi) >= 0:
            break
        hi = hi + (hi - lo)
    glo, ghi = g(lo), g(hi)
    if glo > 0 or ghi < 0:
        raise BracketError(
            f"no sign change for label {k} on [{lo:.6g}, {hi:.6g}]: "
            f"sigma - target = {glo:.3g}, {ghi:.3g}"
        )
    grid = np.linspace(lo, hi, 9)
    if np.any(np.diff(sigma(spec, grid)) <= 0):
        raise BracketError(f"sigma is not monotone on [{lo:.6g}, {hi:.6g}] for label {k}")
    # xtol chosen so that |sigma - target| <= tol / 10 via sigma' = O(1).
    _, der = sigma_with_derivative(spec, grid)
    xtol = max(tol / 10.0 / float(np.max(der)), 4e-16 * hi)
    return brentq(g, lo, hi, xtol=xtol, rtol=1e-15, maxiter=200)


def _sweep(spec: ParitySpectrum, max_newton: int = 40) -> np.ndarray:
    """Solve every quantization condition below K against the current spectrum."""
    if spec.N == 2:
        return 4.0 * spec.targets()
    target = spec.targets()
    x = np.array(spec.levels, dtype=float)
    gap = np.diff(np.concatenate([[0.0], spec.levels_through(spec.K + 2)]))
    lo_step = 0.5 * gap[:-1]
    hi_step = 0.5 * gap[1:]
    done = np.zeros(x.shape, dtype=bool)
    for _ in range(max_newton):
        val, der = sigma_with_derivative(spec, x)
        dx = (val - target) / der
        dx = np.clip(dx, -hi_step, lo_step)
        x = x - dx
        done = np.abs(dx) <= 1e-14 * x
        if done.all():
            break
    if not done.all():
        for i in np.flatnonzero(~done):
            x[i] = solve_level(spec, int(spec.labels[i]), tol=1e-13)
    return x


def fit_tail_coefficients(spec: ParitySpectrum, window: tuple[float, float] = (1 / 8, 1 / 2)):
    """Least-squares fit of (lambda^mu - x) x = e1 + e3 / x^2 on mid-window labels.

    Returns None when the window holds too few levels for a stable fit.
    """
    c = spec.constants
    lab = spec.labels
    sel = (lab >= window[0] * spec.K) & (lab < window[1] * spec.K)
    if sel.sum() < 8:
        return None
    x = 2 * math.pi * (lab[sel] + 0.5) / c.b0
    y = (spec.levels[sel] ** c.mu - x) * x
    A = np.vstack([np.ones_like(x), x**-2]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[0]), float(coef[1])


def _run_stage(spec: ParitySpectrum, eps: float, max_sweeps: int):
    norms: list[float] = []
    steps0: list[float] = []
    converged = False
    for _ in range(max_sweeps):
        new = _sweep(spec)
        rel = np.abs(new - spec.levels) / spec.levels
        norms.append(float(np.max(rel)) if rel.size else 0.0)
        steps0.append(float(new[0] - spec.levels[0]) if rel.size else 0.0)
        spec = spec.with_levels(new)
        if norms[-1] <= eps and quantization_residual(spec) <= max(eps, RESIDUAL_FLOOR):
            converged = True
            break
    return spec, norms, steps0, converged


def quantization_residual(spec: ParitySpectrum) -> float:
    """max_k |2 Sigma(lambda_k) - (k + 1/2 +/- kappa/2)| over the stored levels."""
    if spec.levels.size == 0:
        return 0.0
    val, _ = sigma_with_derivative(spec, spec.levels)
    return float(np.max(np.abs(2 * val - (spec.labels + spec.target_offset))))


def _signed_contraction(norms: Sequence[float], steps0: Sequence[float]) -> float:
    """Geometric ratio of successive sweeps, signed by the ground-level steps.

    Uses the last two sweeps whose displacement is still well above rounding.
    """
    usable = [i for i, n in enumerate(norms) if n > 1e-13]
    if len(norms) < 3 or len(usable) < 2:
        return float("nan")
    i, j = usable[-2], usable[-1]
    if j != i + 1 or norms[i] == 0:
        return float("nan")
    ratio = norms[j] / norms[i]
    sign = 1.0 if steps0[i] * steps0[j] >= 0 else -1.0
    return sign * ratio


def iterate_spectrum(
    N: int,
    parity: Parity | str,
    K: int = DEFAULT_CUTOFF,
    eps: float = 1e-9,
    max_sweeps: int = MAX_SWEEPS,
    tail_refinements: int = 2,
) -> tuple[ParitySpectrum, ConvergenceStats]:
    """Fixed-point iteration of the exact quantization conditions.

    Starts from Bohr-Sommerfeld levels with Bohr-Sommerfeld pins beyond K and
    sweeps until the largest relative level change is <= eps and every
    quantization condition holds to within eps (floored at RESIDUAL_FLOOR).  Each of the
    ``tail_refinements`` follow-up stages fits the first asymptotic correction
    to the converged levels, re-pins the tail with it, and re-converges.  The
    contraction estimate always refers to the first (Bohr-Sommerfeld) stage.
    """
    parity = Parity(parity)
    if K < 4:
        raise ValueError("cutoff K must be >= 4")
    if not eps > 0:
        raise ValueError("eps must be > 0")
    c = dynamical_constants(N)
    labels = np.arange(parity.first_label, K, 2)
    if c.N == 2:
        spec = ParitySpectrum(N=2, parity=parity, levels=2.0 * labels + 1.0, K=K, tol=eps, converged=True)
        return spec, ConvergenceStats(iterations=0, displacement_norms=(), contraction_estimate=float("nan"))

    spec = ParitySpectrum(
        N=c.N, parity=parity, levels=semiclassical_level(c.N, labels), K=K, tol=eps, converged=False
    )
    spec, norms, steps0, converged = _run_stage(spec, eps, max_sweeps)
    contraction = _signed_contraction(norms, steps0)
    total = len(norms)
    refinement_sweeps = []
    for _ in range(tail_refinements):
        coeffs = fit_tail_coefficients(spec)
        if coeffs is None:
            break
        spec = spec.with_levels(spec.levels, tail_coeffs=coeffs)
        spec, more, _, converged = _run_stage(spec, eps, max_sweeps)
        refinement_sweeps.append(len(more))
        total += len(more)
    if not converged:
        log.warning("N=%d %s: no convergence to eps=%g within %d sweeps", N, parity.value, eps, max_sweeps)
    spec = spec.with_levels(spec.levels, converged=converged)
    stats = ConvergenceStats(
        iterations=total,
        displacement_norms=tuple(norms),
        contraction_estimate=contraction,
        refinement_sweeps=tuple(refinement_sweeps),
    )
    return spec, stats
