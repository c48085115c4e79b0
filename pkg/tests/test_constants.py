import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracnls.constants import (
    H_N_alpha,
    HardyConstants,
    c_N_alpha,
    critical_exponent,
    gamma_fn,
    mu_star,
    norm_equivalence_D,
    pv_constant,
)
from fracnls.errors import DomainError

mp.mp.dps = 40


def test_gamma_special_values():
    assert gamma_fn(1.0) == pytest.approx(1.0, rel=1e-15)
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-13)
    assert gamma_fn(5.0) == pytest.approx(24.0, rel=1e-14)


def test_gamma_against_high_precision():
    assert gamma_fn(7.25) == pytest.approx(float(mp.gamma(mp.mpf("7.25"))), rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1e-6, max_value=50.0))
def test_gamma_matches_mpmath(x):
    assert gamma_fn(x) == pytest.approx(float(mp.gamma(mp.mpf(x))), rel=1e-12)


def test_gamma_stays_finite_near_the_top_of_the_range():
    assert gamma_fn(170.5) == pytest.approx(float(mp.gamma(mp.mpf("170.5"))), rel=1e-11)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5, math.nan, math.inf])
def test_gamma_domain(x):
    with pytest.raises(DomainError):
        gamma_fn(x)


def _c_oracle(N, a):
    a, N = mp.mpf(a), mp.mpf(N)
    return 2**a * mp.gamma((N + a) / 2) / (2 * mp.pi ** (N / 2) * abs(mp.gamma(-a / 2)))


@pytest.mark.parametrize("N", [1, 2, 3, 4])
@pytest.mark.parametrize("a", [0.25, 0.5, 1.0, 1.5, 1.9])
def test_quadratic_form_constant(N, a):
    assert c_N_alpha(N, a) == pytest.approx(float(_c_oracle(N, a)), rel=1e-12)
    assert pv_constant(N, a) == pytest.approx(2 * c_N_alpha(N, a), rel=1e-14)


def test_local_limit_values():
    assert mu_star(3, 2.0) == pytest.approx(0.25, rel=1e-12)
    assert mu_star(4, 2.0) == pytest.approx(1.0, rel=1e-12)
    assert c_N_alpha(3, 2.0) == 0.0
    assert math.isinf(H_N_alpha(3, 2.0))


@pytest.mark.parametrize("N,a", [(1, 0.5), (2, 1.0), (3, 1.0), (3, 1.5), (5, 0.3)])
def test_mu_star_is_product_of_constants(N, a):
    assert mu_star(N, a) == pytest.approx(H_N_alpha(N, a) * c_N_alpha(N, a), rel=1e-12)


def test_mu_star_against_high_precision():
    ref = 2 * (mp.gamma(mp.mpf(1)) / mp.gamma(mp.mpf("0.5"))) ** 2
    assert mu_star(3, 1.0) == pytest.approx(float(ref), rel=1e-13)


def test_mu_star_approaches_local_value():
    gaps = [abs(mu_star(3, 2.0 - d) - 0.25) for d in (0.1, 0.01, 0.001)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_domain_errors():
    with pytest.raises(DomainError):
        mu_star(1, 1.0)
    with pytest.raises(DomainError):
        H_N_alpha(2, 2.0)
    with pytest.raises(DomainError):
        critical_exponent(3, 2.5)
    with pytest.raises(DomainError):
        pv_constant(1, 2.0)


def test_norm_equivalence_constant():
    assert norm_equivalence_D(3, 1.0, 0.0) == 0.5
    ms = mu_star(3, 1.0)
    assert norm_equivalence_D(3, 1.0, 0.5 * ms) == pytest.approx(0.25)
    with pytest.raises(DomainError):
        norm_equivalence_D(3, 1.0, ms)
    hc = HardyConstants.of(3, 1.0)
    assert hc.D(0.25 * ms) == pytest.approx(0.375)


def test_critical_exponent():
    assert critical_exponent(1, 0.5) == 4.0
    assert critical_exponent(3, 2.0) == 6.0
