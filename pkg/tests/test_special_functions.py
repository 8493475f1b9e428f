import math

import mpmath
import pytest
from scipy import special

from numerics.special_functions import (
    bessel_i0,
    bessel_i0e,
    bessel_k,
    bessel_ke,
    erf,
    erfc,
    gamma,
    kummer_m,
    kummer_m_derivative,
    tricomi_u_half,
    tricomi_u_half_bessel_form,
    tricomi_u_half_derivative,
)
from runtime.errors import DomainError, OverflowSignal, PoleError


@pytest.mark.parametrize("x", [-3.0, -0.4, 0.0, 1e-8, 0.5, 1.0, 2.5, 3.7, 6.0, 30.0])
def test_erf_matches_scipy(x):
    res = erf(x)
    assert res.value == pytest.approx(special.erf(x), rel=1e-14, abs=1e-16)
    assert abs(res.value - special.erf(x)) <= res.abs_error_bound + 4e-16 * abs(res.value) + 1e-300


@pytest.mark.parametrize("x", [0.0, 1.0, 2.4, 2.6, 5.0, 10.0, 26.0])
def test_erfc_matches_scipy(x):
    assert erfc(x).value == pytest.approx(special.erfc(x), rel=1e-12, abs=1e-300)


def test_erf_limits():
    assert erf(math.inf).value == 1.0
    assert erf(-math.inf).value == -1.0
    assert erfc(30.0).value == 0.0
    assert erfc(-math.inf).value == 2.0
    with pytest.raises(DomainError):
        erf(math.nan)


@pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 2.5, 7.3, 20.0, 100.5, -0.5, -2.5])
def test_gamma_matches_scipy(x):
    assert gamma(x).value == pytest.approx(special.gamma(x), rel=1e-12)


def test_gamma_poles_and_overflow():
    for x in (0.0, -1.0, -7.0):
        with pytest.raises(PoleError):
            gamma(x)
    with pytest.raises(OverflowSignal):
        gamma(172.0)


@pytest.mark.parametrize("x", [1e-6, 0.3, 1.0, 2.0, 5.0, 19.0, 25.0, 60.0, 300.0])
def test_bessel_k_scaled_matches_scipy(x):
    assert bessel_ke(0, x).value == pytest.approx(special.k0e(x), rel=1e-10)
    assert bessel_ke(1, x).value == pytest.approx(special.k1e(x), rel=1e-10)


@pytest.mark.parametrize("x", [0.01, 0.5, 1.9, 4.0])
def test_bessel_k_unscaled(x):
    assert bessel_k(0, x).value == pytest.approx(special.k0(x), rel=1e-10)
    assert bessel_k(1, x).value == pytest.approx(special.k1(x), rel=1e-10)


@pytest.mark.parametrize("x", [0.0, 0.5, 3.0, 15.0, 40.0, 500.0])
def test_bessel_i0_scaled(x):
    assert bessel_i0e(x).value == pytest.approx(special.i0e(x), rel=1e-12)
    if x < 700:
        assert bessel_i0(x).value == pytest.approx(special.i0(x), rel=1e-12)


@pytest.mark.parametrize("xi", [0.0, 0.01, 0.5, 1.0, 1.58, 3.0, 10.0, 20.0])
def test_kummer_m_matches_mpmath(xi):
    expected = float(mpmath.hyp1f1(-0.5, 1, xi))
    assert abs(kummer_m(-0.5, 1.0, xi).value - expected) <= 1e-12 * max(1.0, abs(expected))


def test_kummer_m_derivatives_match_mpmath():
    for xi in (0.2, 1.0, 4.0):
        d1 = float(mpmath.diff(lambda x: mpmath.hyp1f1(-0.5, 1, x), xi, 1))
        d2 = float(mpmath.diff(lambda x: mpmath.hyp1f1(-0.5, 1, x), xi, 2))
        assert kummer_m_derivative(-0.5, 1.0, xi, 1).value == pytest.approx(d1, rel=1e-9)
        assert kummer_m_derivative(-0.5, 1.0, xi, 2).value == pytest.approx(d2, rel=1e-9)


def test_kummer_m_terminates_for_nonpositive_integer_a():
    # M(-2, 1, x) = 1 - 2x + x^2/2
    assert kummer_m(-2.0, 1.0, 3.0).value == pytest.approx(1 - 6 + 4.5, abs=1e-14)


def test_kummer_m_domain():
    with pytest.raises(PoleError):
        kummer_m(-0.5, 0.0, 1.0)
    with pytest.raises(DomainError):
        kummer_m(-0.5, 1.0, -1.0)
    with pytest.raises(OverflowSignal):
        kummer_m(-0.5, 1.0, 800.0)


@pytest.mark.parametrize("xi", [1e-6, 0.05, 0.197, 1.0, 4.0, 16.0, 60.0])
def test_tricomi_u_matches_mpmath(xi):
    expected = float(mpmath.hyperu(-0.5, 1, xi))
    assert tricomi_u_half(xi).value == pytest.approx(expected, rel=1e-10, abs=1e-12)


def test_tricomi_bessel_form_is_two_sqrt_pi_u():
    for xi in (0.3, 2.0, 9.0):
        form = tricomi_u_half_bessel_form(xi).value
        assert form == pytest.approx(2 * math.sqrt(math.pi) * float(mpmath.hyperu(-0.5, 1, xi)),
                                     rel=1e-10)


def test_tricomi_u_derivatives():
    for xi in (0.5, 3.0):
        d1 = float(mpmath.diff(lambda x: mpmath.hyperu(-0.5, 1, x), xi, 1))
        d2 = float(mpmath.diff(lambda x: mpmath.hyperu(-0.5, 1, x), xi, 2))
        assert tricomi_u_half_derivative(xi, 1).value == pytest.approx(d1, rel=1e-9)
        assert tricomi_u_half_derivative(xi, 2).value == pytest.approx(d2, rel=1e-9)


def test_tricomi_u_small_argument_is_logarithmic():
    # U(-1/2, 1, xi) ~ (ln xi + 1.1909) / (2 sqrt(pi)) as xi -> 0
    xi = 1e-12
    value = tricomi_u_half(xi).value
    assert value < 0
    assert value == pytest.approx((math.log(xi) + 1.1909) / (2 * math.sqrt(math.pi)), rel=1e-4)


def test_tricomi_u_domain():
    with pytest.raises(DomainError):
        tricomi_u_half(0.0)
    with pytest.raises(DomainError):
        tricomi_u_half_derivative(-1.0)
