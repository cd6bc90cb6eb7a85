"""The nine acceptance criteria, each at its stated tolerance.

Every test prints one PASS/FAIL line; run with ``pytest tests/test_acceptance.py -s``
or read them from the verbose log.
"""

import json
import math
import time

import numpy as np
import pytest

from exactwkb import cli
from exactwkb.constants import dynamical_constants
from exactwkb.determinant import (
    asymptotic_check,
    det_parity,
    harmonic_det,
    validated_radius,
    zeta_prime_zero,
)
from exactwkb.identities import (
    airy_product_agreement,
    cocycle_polynomial_residual,
    dependence_residual,
    pairing_residual,
    stokes_equation_residual,
    sum_rule_report,
    wronskian_residual,
    zeta_table,
)
from exactwkb.special import RHO
from exactwkb.spectrum import iterate_spectrum, sigma_with_derivative
from exactwkb.variational import ritz_spectrum

CUBIC_EVEN = [1.0229479, 6.3702932, 12.870297, 20.000879, 27.592421]
CUBIC_ODD = [3.4505627, 9.5220764, 16.369373, 23.745471, 31.530790]

# reported geometric ratios (even, odd)
CONTRACTION = {3: (0.233, 0.189), 4: (0.392, 0.333), 1: (-0.37, -0.25)}
# ratios drift with the cutoff; K = 1024 is where all six settle inside the band
CONTRACTION_CUTOFF = 1024


@pytest.fixture
def verdict(capsys):
    def emit(criterion, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
        assert ok, detail

    return emit


def test_criterion_1_cubic_table(verdict):
    t0 = time.perf_counter()
    cfg = cli.RunConfig(command="spectrum", N=3, levels=5, eps=1e-9)
    code, text, err = cli.run(cfg)
    elapsed = time.perf_counter() - t0
    assert err is None and code == 0
    res = json.loads(text)["results"]
    got = np.array(res["even"]["levels"] + res["odd"]["levels"])
    dev = float(np.max(np.abs(got - np.array(CUBIC_EVEN + CUBIC_ODD))))
    verdict(1, dev <= 5e-7 and elapsed <= 60, f"max |dev| {dev:.2e} (<= 5e-7) in {elapsed:.1f} s (<= 60 s)")


def test_criterion_2_ritz_oracle(pair, verdict):
    even, odd = pair(3)
    dev = 0.0
    for spec in (even, odd):
        r = ritz_spectrum(3, spec.parity, (20, 30, 40), n_levels=6)
        dev = max(dev, float(np.max(np.abs(r.best - spec.levels[:6]))))
    verdict(2, dev <= 1e-6, f"Ritz vs fixed point, 6 levels per parity: max |dev| {dev:.2e} (<= 1e-6)")


def test_criterion_3_contraction(verdict):
    parts, ok = [], True
    for N, targets in CONTRACTION.items():
        for parity, target in zip(("even", "odd"), targets):
            _, stats = iterate_spectrum(N, parity, K=CONTRACTION_CUTOFF, eps=1e-12, tail_refinements=0)
            r = stats.contraction_estimate
            ok &= abs(r - target) <= 0.05
            parts.append(f"N={N} {parity} {r:+.3f} vs {target:+.3f}")
    verdict(3, ok, "; ".join(parts) + " (+-0.05)")


def test_criterion_4_airy_duality(pair, verdict):
    rep = airy_product_agreement(pair(1), np.linspace(-3, 3, 61), threshold=1e-4)
    verdict(4, rep.passed, f"max |D - Airy| {rep.max_abs_residual:.2e} on [-3, 3] (<= 1e-4)")


def test_criterion_5_identities(pair, verdict):
    reports = [wronskian_residual(N, pair(N), threshold=1e-5) for N in (1, 3, 4)]
    reports += [cocycle_polynomial_residual(N, pair(N), threshold=1e-5) for N in (1, 4)]
    reports.append(cocycle_polynomial_residual(1, None, side="airy", threshold=1e-5))
    reports.append(pairing_residual(4, pair(4), threshold=1e-5))
    reports.append(dependence_residual(side="airy", threshold=1e-9))
    reports += [stokes_equation_residual(N, pair(N), threshold=1e-5) for N in (4, 3, 1)]
    worst = max(reports, key=lambda r: r.max_rel_residual / r.threshold)
    failed = [f"{r.identity_id}(N={r.N})" for r in reports if not r.passed]
    verdict(
        5,
        not failed,
        f"{len(reports)} checks, worst {worst.identity_id} N={worst.N} at {worst.max_rel_residual:.2e}"
        + (f"; failed {failed}" if failed else ""),
    )


def test_criterion_6_sum_rules(pair, verdict):
    t1, t4 = zeta_table(pair(1)), zeta_table(pair(4))
    checks = {
        "Z+(3)=1 (N=1)": (t1.plus[3] - 1, 1e-6),
        "Z-(1)=-rho": (t1.minus[1] + RHO, 1e-6),
        "Z+(2)=1/rho": (t1.plus[2] - 1 / RHO, 1e-6),
        "Z'(0)=-log 2 (N=4)": (t4.prime_plus + t4.prime_minus + math.log(2), 1e-6),
        "Z'(0)=-log(2/sqrt3) (N=1)": (t1.prime_plus + t1.prime_minus + math.log(2 / math.sqrt(3)), 1e-6),
    }
    for N in (1, 3, 4):
        table = t1 if N == 1 else t4 if N == 4 else zeta_table(pair(3))
        for r in sum_rule_report(table):
            if r.identity_id.startswith("sum-rule:closed-form"):
                checks[f"{r.identity_id[9:]} (N={N})"] = (r.max_abs_residual, 1e-5)
    bad = [k for k, (res, tol) in checks.items() if abs(res) > tol]
    worst = max(abs(res) / tol for res, tol in checks.values())
    verdict(6, not bad, f"{len(checks)} sum rules, worst at {worst:.2e} of tolerance" + (f"; failed {bad}" if bad else ""))


def test_criterion_7_harmonic(verdict):
    dev_det = 0.0
    for parity in ("even", "odd"):
        spec, _ = iterate_spectrum(2, parity, K=64)
        closed = harmonic_det(parity, 0.0).real
        dev_det = max(dev_det, abs(math.exp(-zeta_prime_zero(spec)) / closed - 1))
    dev_ritz = 0.0
    for parity, first in (("even", 0), ("odd", 1)):
        r = ritz_spectrum(2, parity, (20, 30, 40))
        exact = 2 * (first + 2 * np.arange(r.best.size)) + 1
        dev_ritz = max(dev_ritz, float(np.max(np.abs(r.best - exact))))
    verdict(
        7,
        dev_det <= 1e-12 and dev_ritz <= 1e-10,
        f"exp(-Z'(0)) vs Gamma form {dev_det:.1e} (<= 1e-12); Ritz vs 2k+1 {dev_ritz:.1e} (<= 1e-10)",
    )


def test_criterion_8_asymptotics(pair, verdict):
    dev = asymptotic_check(*pair(4), 50.0)
    verdict(8, dev <= 0.01, f"|log D(50)/(a0 50^(3/4)) - 1| = {dev:.2e} (<= 0.01)")


def test_criterion_9_properties(pair, verdict):
    notes, ok = [], True
    # interlacing: even and odd levels alternate
    for N in (1, 3, 4):
        even, odd = pair(N)
        n = min(even.levels.size, odd.levels.size)
        merged = np.empty(2 * n)
        merged[0::2], merged[1::2] = even.levels[:n], odd.levels[:n]
        ok &= bool(np.all(np.diff(merged) > 0))
    notes.append(f"interlacing {'ok' if ok else 'broken'}")
    # variational monotonicity in basis size
    r = ritz_spectrum(3, "even", (10, 20, 30), n_levels=6)
    mono = all(np.all(b <= a + 1e-12) for a, b in zip(r.eigenvalues, r.eigenvalues[1:]))
    ok &= mono
    notes.append(f"Ritz monotone {mono}")
    # sigma is increasing on the positive axis
    sig_ok = True
    for N in (1, 3, 4):
        for spec in pair(N):
            x = np.linspace(0, validated_radius(spec), 400)
            s, ds = sigma_with_derivative(spec, x)
            sig_ok &= bool(np.all(np.diff(s) > 0) and np.all(ds[1:] > 0))
    ok &= sig_ok
    notes.append(f"Sigma monotone {sig_ok}")
    # subscript shifts leave the Wronskian residual at the same level
    spread = 0.0
    for N in (1, 3, 4):
        res = [wronskian_residual(N, pair(N), shifts=[l]).max_rel_residual for l in range(dynamical_constants(N).L)]
        spread = max(spread, max(res))
    ok &= spread <= 1e-5
    notes.append(f"shifted residuals <= {spread:.1e}")
    # conjugate symmetry
    rng = np.random.default_rng(0)
    z = rng.uniform(-4, 4, 16) + 1j * rng.uniform(-4, 4, 16)
    conj = max(
        float(np.max(np.abs(det_parity(s, z.conj()) - det_parity(s, z).conj()) / np.abs(det_parity(s, z))))
        for N in (1, 3, 4)
        for s in pair(N)
    )
    ok &= conj <= 1e-12
    notes.append(f"conjugate symmetry {conj:.1e}")
    verdict(9, ok, "; ".join(notes))
