"""Rayleigh-Ritz spectra in the harmonic-oscillator basis.

Matrix elements of |q|^N between normalized Hermite functions are a double
sum of alternating terms that cancel heavily at high index; they are summed
here in exact rational arithmetic and rounded once at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .constants import _check_degree
from .spectrum import Parity

__all__ = [
    "RitzResult",
    "JacobiError",
    "matrix_element_qN",
    "element_cancellation",
    "build_hamiltonian",
    "jacobi_eigenvalues",
    "ritz_spectrum",
    "DEFAULT_SIZES",
    "MAX_INDEX_SUM",
]

DEFAULT_SIZES = (20, 30, 40)
# size 80 in the odd sector reaches n = 159, hence index sums up to 316
MAX_INDEX_SUM = 320


class JacobiError(RuntimeError):
    """The rotation budget ran out before the off-diagonal part was annihilated."""


@lru_cache(maxsize=None)
def _hermite_weights(n: int) -> tuple[int, ...]:
    # n! / (i! (n - 2i)!), i = 0..n/2
    return tuple(math.factorial(n) // (math.factorial(i) * math.factorial(n - 2 * i)) for i in range(n // 2 + 1))


@lru_cache(maxsize=None)
def _exact_terms(N: int, n1: int, n2: int) -> tuple[Fraction, ...]:
    """Rational terms of the grouped double sum, one per m = m' + m''.

    The element equals sqrt(2^(n1+n2) / (pi n1! n2!)) times the sum of these
    terms, times sqrt(pi) when (1 + N + n1 + n2)/2 is a half-integer.
    """
    a, b = _hermite_weights(n1), _hermite_weights(n2)
    conv = [
        sum(a[i] * b[m - i] for i in range(max(0, m - len(b) + 1), min(m, len(a) - 1) + 1))
        for m in range(len(a) + len(b) - 1)
    ]
    two_A = 1 + N + n1 + n2
    terms = []
    for m, cm in enumerate(conv):
        if two_A % 2:
            j = (two_A - 1) // 2 - m  # Gamma(j + 1/2) / sqrt(pi)
            g = Fraction(math.factorial(2 * j), 4**j * math.factorial(j))
        else:
            g = math.factorial(two_A // 2 - m - 1)
        terms.append(Fraction((-1) ** m * cm, 4**m) * g)
    return tuple(terms)


def _check_indices(n1, n2) -> tuple[int, int]:
    n1, n2 = int(n1), int(n2)
    if n1 < 0 or n2 < 0:
        raise ValueError("basis indices must be >= 0")
    if n1 + n2 > MAX_INDEX_SUM:
        raise ValueError(f"index sum {n1 + n2} exceeds the supported bound {MAX_INDEX_SUM}")
    return n1, n2


@lru_cache(maxsize=None)
def matrix_element_qN(N: int, n1: int, n2: int) -> float:
    """<n1| |q|^N |n2> in the unit-frequency Hermite basis.

    Zero unless n1 and n2 have the same parity.
    """
    N = _check_degree(N)
    # sorted so the float rounding, and hence H, is exactly symmetric
    n1, n2 = sorted(_check_indices(n1, n2))
    if (n1 - n2) % 2:
        return 0.0
    R = sum(_exact_terms(N, n1, n2), Fraction(0))
    if R == 0:
        return 0.0
    log_pref = 0.5 * ((n1 + n2) * math.log(2) - math.log(math.pi) - math.lgamma(n1 + 1) - math.lgamma(n2 + 1))
    if (1 + N + n1 + n2) % 2:
        log_pref += 0.5 * math.log(math.pi)
    log_r = math.log(abs(R.numerator)) - math.log(R.denominator)
    return math.copysign(math.exp(log_pref + log_r), R)


def element_cancellation(N: int, n1: int, n2: int) -> float:
    """log10 of (sum of |terms|) / |sum|: digits a floating-point sum would lose."""
    n1, n2 = _check_indices(n1, n2)
    if (n1 - n2) % 2:
        return 0.0
    terms = _exact_terms(_check_degree(N), n1, n2)
    total = abs(sum(terms, Fraction(0)))
    if total == 0:
        return math.inf
    mag = sum(abs(t) for t in terms)
    return math.log10(mag.numerator) - math.log10(mag.denominator) - (
        math.log10(total.numerator) - math.log10(total.denominator)
    )


def build_hamiltonian(N: int, parity: Parity | str, size: int) -> np.ndarray:
    """H = diag(2n+1) - <q^2> + <|q|^N> on the Hermite functions of one parity."""
    parity = Parity(parity)
    if not 10 <= size <= 80:
        raise ValueError("basis size must lie in [10, 80]")
    ns = [parity.first_label + 2 * i for i in range(size)]
    H = np.empty((size, size))
    for i, a in enumerate(ns):
        for j in range(i, size):
            b = ns[j]
            v = matrix_element_qN(N, a, b) - matrix_element_qN(2, a, b)
            H[i, j] = H[j, i] = v
        H[i, i] += 2 * a + 1
    return H


def jacobi_eigenvalues(A: np.ndarray, tol: float = 1e-12, max_sweeps: int = 50) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.

    Sweeps until the off-diagonal Frobenius norm is <= tol * ||A||_F.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n) or not np.allclose(A, A.T, atol=1e-12 * max(1.0, np.abs(A).max())):
        raise ValueError("jacobi_eigenvalues expects a symmetric square matrix")
    scale = np.linalg.norm(A)
    iu = np.triu_indices(n, 1)
    for _ in range(max_sweeps):
        off = math.sqrt(2 * float(np.sum(A[iu] ** 2)))
        if off <= tol * scale:
            return np.sort(np.diag(A))
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1))
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                A[p, q] = A[q, p] = 0.0
    raise JacobiError(f"off-diagonal norm still {off:.3e} after {max_sweeps} sweeps")


@dataclass(frozen=True)
class RitzResult:
    N: int
    parity: Parity
    basis_sizes: tuple[int, ...]
    eigenvalues: tuple[np.ndarray, ...]
    stable_digits: tuple[int, ...]

    @property
    def best(self) -> np.ndarray:
        """Eigenvalues from the largest basis."""
        return self.eigenvalues[-1]

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "parity": self.parity.value,
            "basis_sizes": list(self.basis_sizes),
            "eigenvalues": [list(map(float, e)) for e in self.eigenvalues],
            "stable_digits": list(self.stable_digits),
        }


def _stable_digits(a: np.ndarray, b: np.ndarray) -> tuple[int, ...]:
    out = []
    for x, y in zip(a, b):
        d = abs(x - y)
        out.append(16 if d == 0 else max(0, min(16, int(math.floor(-math.log10(d / abs(y)))))))
    return tuple(out)


def ritz_spectrum(
    N: int, parity: Parity | str, sizes: Sequence[int] = DEFAULT_SIZES, n_levels: int | None = None
) -> RitzResult:
    """Diagonalize leading truncations of the parity-restricted Hamiltonian.

    ``stable_digits`` counts matching significant digits between the two
    largest sizes for each level.
    """
    parity = Parity(parity)
    sizes = tuple(int(s) for s in sizes)
    if not sizes or list(sizes) != sorted(sizes) or len(set(sizes)) != len(sizes):
        raise ValueError("sizes must be strictly ascending")
    H = build_hamiltonian(N, parity, sizes[-1])
    n_levels = sizes[0] if n_levels is None else min(n_levels, sizes[0])
    eig = tuple(jacobi_eigenvalues(H[:s, :s])[:n_levels] for s in sizes)
    digits = _stable_digits(eig[-2], eig[-1]) if len(eig) > 1 else (0,) * n_levels
    return RitzResult(N=N, parity=parity, basis_sizes=sizes, eigenvalues=eig, stable_digits=digits)
