import cmath
import math

import numpy as np
import pytest

from exactwkb.constants import dynamical_constants
from exactwkb.determinant import det_parity, zeta_prime_zero
from exactwkb.identities import (
    J,
    MissingZetaError,
    ZetaTable,
    airy_product_agreement,
    airy_wronskian_residual,
    cocycle_polynomial_residual,
    default_grid,
    dependence_residual,
    lhs_weights,
    lhs_weights_recur,
    linear_system_determinant,
    linear_system_prefactor,
    pairing_residual,
    stokes_determinant_residual,
    stokes_equation_residual,
    sum_rule_report,
    taylor_rank_residuals,
    verify_all,
    wronskian_residual,
    zeta_table,
)


@pytest.fixture(scope="module")
def tables(pair):
    return {N: zeta_table(pair(N)) for N in (1, 3, 4)}


def test_default_grid_shape(pair):
    spectra = pair(4)
    g = default_grid(spectra)
    assert g.size == 32
    real, circ = g[:24], g[24:]
    assert np.all(real.imag == 0) and real.real.min() == 0
    assert real.real.max() == pytest.approx(spectra[0].level(4))
    np.testing.assert_allclose(np.abs(circ), 1)
    assert np.any(np.abs(circ.imag) > 0.5)


@pytest.mark.parametrize("N", [1, 3, 4])
def test_wronskian(pair, N):
    rep = wronskian_residual(N, pair(N))
    assert rep.passed
    assert rep.max_rel_residual <= 1e-6
    assert rep.max_abs_residual >= 0


def test_wronskian_rejects_harmonic(pair):
    with pytest.raises(ValueError):
        wronskian_residual(2, pair(4))


def test_airy_wronskian():
    rep = airy_wronskian_residual()
    assert rep.passed and rep.max_rel_residual <= 1e-8


@pytest.mark.parametrize("N", [1, 3, 4])
def test_shift_invariance(pair, N):
    L = dynamical_constants(N).L
    res = [wronskian_residual(N, pair(N), shifts=[l]).max_rel_residual for l in range(L)]
    assert max(res) - min(res) <= 1e-5
    assert max(res) <= 1e-5


def test_linear_system_prefactor():
    assert linear_system_prefactor(4) == pytest.approx(1.0, abs=1e-15)
    assert linear_system_prefactor(1) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        linear_system_determinant(3, None, 0.0)


def test_linear_system_quartic(pair):
    even, odd = pair(4)
    d0 = linear_system_determinant(4, (even, odd), 0.0)
    assert d0 == pytest.approx(2j * math.exp(-3 * zeta_prime_zero(even)), rel=1e-12)
    lam = 1.7
    phi = dynamical_constants(4).phi
    prod = np.prod([det_parity(even, lam * cmath.exp(1j * l * phi)) for l in range(3)])
    assert linear_system_determinant(4, (even, odd), lam) == pytest.approx(2j * prod, rel=1e-12)


def test_linear_system_airy_vanishes(pair):
    even, odd = pair(1)
    for lam in (0.0, 1.0, -2.0 + 0.5j):
        phi = dynamical_constants(1).phi
        scale = np.prod([abs(det_parity(even, lam * cmath.exp(1j * l * phi))) for l in range(3)])
        assert abs(linear_system_determinant(1, (even, odd), lam)) <= 1e-12 * max(scale, 1)


def test_pairing(pair):
    rep = pairing_residual(4, pair(4), np.linspace(0, 5, 21))
    assert rep.passed and rep.max_rel_residual <= 1e-5
    assert rep.skipped_points == ()


def test_pairing_at_origin(pair):
    even, odd = pair(4)
    p = det_parity(even, 0.0)
    lhs = (p - J * J * p - J * p) / (p * p)
    assert lhs == pytest.approx(math.exp(-zeta_prime_zero(odd)), rel=1e-6)


def test_pairing_only_quartic(pair):
    with pytest.raises(ValueError):
        pairing_residual(3, pair(3))


def test_dependence(pair):
    assert 1 + J * J + J**4 == pytest.approx(0, abs=1e-15)
    prod = dependence_residual(pair(1), side="product")
    oracle = dependence_residual(side="airy")
    assert prod.passed and prod.max_rel_residual <= 1e-5
    assert oracle.passed and oracle.max_rel_residual <= 1e-9
    with pytest.raises(ValueError):
        dependence_residual(side="other")


def test_airy_sides_agree(pair):
    rep = airy_product_agreement(pair(1), threshold=1e-5)
    assert rep.passed


@pytest.mark.parametrize("N", [1, 4])
def test_cocycle_polynomial(pair, N):
    rep = cocycle_polynomial_residual(N, pair(N))
    assert rep.passed and rep.max_rel_residual <= 1e-5


def test_cocycle_polynomial_airy():
    rep = cocycle_polynomial_residual(1, None, side="airy")
    assert rep.passed and rep.max_rel_residual <= 1e-9


def test_cocycle_values_at_origin(pair):
    even, odd = pair(4)
    d = det_parity(even, 0.0) * det_parity(odd, 0.0)
    assert d == pytest.approx(2, abs=1e-6)
    assert d**3 == pytest.approx(3 * d + 2, abs=1e-5)
    even, odd = pair(1)
    d = det_parity(even, 0.0) * det_parity(odd, 0.0)
    assert d == pytest.approx(2 / math.sqrt(3), abs=1e-7)
    assert 3 * d * d - 6 * d * d + 4 == pytest.approx(0, abs=1e-6)


@pytest.mark.parametrize("N", [1, 3, 4])
def test_stokes_equations(pair, N):
    rep = stokes_equation_residual(N, pair(N))
    assert rep.passed and rep.max_rel_residual <= 1e-5


def test_stokes_determinant(pair):
    assert stokes_determinant_residual(pair(4)).passed


def test_weights_recur():
    for N in (1, 3, 4, 6):
        assert lhs_weights_recur(N)
    # at rank 0 both parities carry the same weight -sin(phi/4)
    a, b = lhs_weights(3, 0)
    assert a == pytest.approx(b) == pytest.approx(-math.sin(dynamical_constants(3).phi / 4))


@pytest.mark.parametrize("N", [1, 3, 4])
def test_taylor_ranks_vanish(tables, N):
    r = taylor_rank_residuals(tables[N])
    assert r.size == 10
    assert np.max(np.abs(r)) <= 1e-6


@pytest.mark.parametrize("N", [1, 3, 4])
def test_sum_rules(tables, N):
    reports = sum_rule_report(tables[N])
    failed = [r.identity_id for r in reports if not r.passed]
    assert failed == []
    ids = {r.identity_id for r in reports}
    assert {"sum-rule:rank-0", "sum-rule:rank-1", "sum-rule:rank-2"} <= ids


def test_special_sum_rule_ids(tables):
    ids4 = {r.identity_id for r in sum_rule_report(tables[4])}
    ids1 = {r.identity_id for r in sum_rule_report(tables[1])}
    assert "sum-rule:quartic-z3-closure" in ids4
    assert "sum-rule:airy-z3-plus" in ids1
    assert not any(i.startswith("sum-rule:airy") for i in ids4)


def test_missing_zeta_values():
    t = ZetaTable(N=4, plus={1: 0.1}, minus={}, prime_plus=None)
    with pytest.raises(MissingZetaError) as err:
        sum_rule_report(t)
    msg = str(err.value)
    assert "Z+(2)" in msg and "Z-(1)" in msg and "Z+'(0)" in msg


def test_sum_rule_detects_wrong_input(tables):
    t = tables[4]
    bad = ZetaTable(N=4, plus={**t.plus, 1: t.plus[1] * 1.01}, minus=t.minus,
                    prime_plus=t.prime_plus, prime_minus=t.prime_minus)
    assert not all(r.passed for r in sum_rule_report(bad))


def test_report_fields(pair):
    rep = wronskian_residual(3, pair(3))
    d = rep.as_dict()
    assert d["identity_id"] == "wronskian" and d["N"] == 3
    assert rep.passed == (rep.max_rel_residual <= rep.threshold)
    assert len(rep.sample_points) == 32


@pytest.mark.parametrize("N", [1, 3, 4])
def test_verify_all(pair, N):
    reports = verify_all(N, pair(N))
    assert all(r.passed for r in reports), [r.identity_id for r in reports if not r.passed]
