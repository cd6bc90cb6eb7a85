import math

import pytest
from scipy.special import gamma as sgamma

from exactwkb.constants import duality_check, dynamical_constants


def test_cubic_constants():
    c = dynamical_constants(3)
    assert c.mu == pytest.approx(5 / 6, rel=1e-15)
    assert c.phi == pytest.approx(4 * math.pi / 5, rel=1e-15)
    assert c.L == 5
    assert c.kappa == pytest.approx(0.2, rel=1e-15)
    b0 = 2 ** (2 / 3) * math.sqrt(3) / (5 * math.pi) * sgamma(1 / 3) ** 3
    assert c.b0 == pytest.approx(b0, rel=1e-13)


def test_quartic_constants():
    c = dynamical_constants(4)
    assert (c.mu, c.L) == (0.75, 3)
    assert c.phi == pytest.approx(2 * math.pi / 3)
    assert c.kappa == pytest.approx(1 / 3)
    b0 = math.sqrt(2 / math.pi) / 3 * sgamma(0.25) ** 2
    assert c.b0 == pytest.approx(b0, rel=1e-13)
    assert c.a0 == pytest.approx(b0 / math.sqrt(2), rel=1e-13)


def test_linear_constants():
    c = dynamical_constants(1)
    assert c.mu == 1.5
    assert c.phi == pytest.approx(4 * math.pi / 3)
    assert c.L == 3
    assert c.b0 == pytest.approx(8 / 3, rel=1e-14)
    assert c.a0 == pytest.approx(-4 / 3, rel=1e-13)
    assert c.kappa == pytest.approx(-1 / 3)


def test_harmonic_has_no_a0():
    c = dynamical_constants(2)
    assert c.a0 is None
    assert (c.mu, c.L, c.kappa) == (1.0, 2, 0.0)
    assert c.phi == pytest.approx(math.pi)


@pytest.mark.parametrize("N", range(1, 13))
def test_symmetry_closure(N):
    c = dynamical_constants(N)
    assert abs(c.kappa) < 1
    assert float(c.mu_exact) == pytest.approx(c.mu, rel=1e-15)
    assert float(c.kappa_exact) == pytest.approx(c.kappa, rel=1e-15, abs=1e-16)
    if N == 2:
        return
    want = math.pi if N % 2 else math.pi / 2
    assert c.cocycle_total == pytest.approx(want, rel=1e-15)


@pytest.mark.parametrize("bad", [0, -1, 2.5, True])
def test_bad_degree(bad):
    with pytest.raises(ValueError):
        dynamical_constants(bad)


@pytest.mark.parametrize("N, dual", [(1, 4), (4, 1), (2, 2)])
def test_duality_pairs(N, dual):
    rep = duality_check(N)
    assert rep.dual == dual
    assert rep.holds


@pytest.mark.parametrize("N", [3, 5, 6, 8])
def test_no_integer_dual(N):
    rep = duality_check(N)
    assert rep.dual is None
    assert not rep.holds
    assert "no integer dual" in rep.message
