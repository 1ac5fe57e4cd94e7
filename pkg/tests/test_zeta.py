import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import loggamma

from oracles import hurwitz_mpmath, primes_trial
from quadlab.arith import PrimeTable
from quadlab.zeta import (
    DEFAULT_ZETA,
    PoleError,
    ZetaEvaluator,
    cos_sum_reference,
    estimate_mertens_b1,
    gamma,
    hurwitz_zeta,
    log_gamma,
    prime_sum_cos,
    prime_sum_logp,
    prime_sum_reciprocal,
    riemann_zeta,
)

EULER_GAMMA = 0.5772156649015329


@pytest.fixture(scope="module")
def table():
    return PrimeTable(10**7)


def test_zeta_two():
    assert abs(riemann_zeta(2) - math.pi**2 / 6) <= 1e-12 * math.pi**2 / 6


def test_zeta_near_pole_laurent():
    delta = 1e-3
    assert abs(riemann_zeta(1 + delta) - (1 / delta + EULER_GAMMA)) <= 1e-3


def test_zeta_half_against_more_terms():
    oracle = ZetaEvaluator(euler_maclaurin_terms=256).riemann(0.5)
    val = riemann_zeta(0.5)
    assert abs(val - oracle) <= 1e-12
    assert val.real == pytest.approx(-1.4603545088, abs=1e-10)


def test_pole_error():
    with pytest.raises(PoleError):
        riemann_zeta(1.0)
    with pytest.raises(PoleError):
        hurwitz_zeta(1 + 1e-13, 0.5)


def test_domain_errors():
    with pytest.raises(ValueError):
        riemann_zeta(-0.5)
    with pytest.raises(ValueError):
        hurwitz_zeta(2, 0.0)
    with pytest.raises(ValueError):
        hurwitz_zeta(2, 1.5)
    with pytest.raises(ValueError):
        hurwitz_zeta(-1.5, 0.5)
    with pytest.raises(ValueError):
        ZetaEvaluator(bernoulli_order=7)


@pytest.mark.parametrize("s", [0.5 + 14.134725j, 0.5 + 100j, 0.7 + 1000j, 2 + 3j, 0.3 + 1j, 1.5])
def test_zeta_against_mpmath(s):
    ref = hurwitz_mpmath(s, 1.0)
    assert abs(riemann_zeta(s) - ref) <= 1e-11 * max(1.0, abs(ref))


@pytest.mark.parametrize("t", [1e4, 1e5])
def test_zeta_large_height(t):
    s = complex(0.5, t)
    ref = hurwitz_mpmath(s, 1.0)
    # phase error in t log n limits double precision at large heights
    assert abs(riemann_zeta(s) - ref) <= 1e-9 * max(1.0, abs(ref))


def test_hurwitz_examples():
    assert abs(hurwitz_zeta(2, 1.0) - math.pi**2 / 6) <= 1e-13
    assert abs(hurwitz_zeta(2, 0.5) - math.pi**2 / 2) <= 1e-12
    n = np.arange(10**6, dtype=np.float64)
    direct = math.fsum((n + 0.25) ** -3) + 0.5 * (10**6 + 0.25) ** -2  # tail integral
    assert abs(hurwitz_zeta(3, 0.25) - direct) <= 1e-10


@pytest.mark.parametrize("s", [2, 3, 0.5 + 3j])
def test_hurwitz_half_identity(s):
    lhs = hurwitz_zeta(s, 0.5)
    rhs = (2**s - 1) * riemann_zeta(s)
    assert abs(lhs - rhs) <= 1e-10 * abs(rhs)


@given(
    st.floats(0.05, 3.0),
    st.floats(-50.0, 50.0),
    st.floats(0.01, 1.0),
)
@settings(max_examples=40, deadline=None)
def test_hurwitz_matches_mpmath(sigma, t, a):
    s = complex(sigma, t)
    if abs(s - 1) < 1e-3:
        return
    ref = hurwitz_mpmath(s, a)
    assert abs(hurwitz_zeta(s, a) - ref) <= 1e-10 * max(1.0, abs(ref))


def test_hurwitz_array_argument():
    a = np.array([0.1, 0.5, 1.0])
    vals = hurwitz_zeta(0.5 + 2j, a)
    for ai, v in zip(a, vals):
        assert abs(v - hurwitz_mpmath(0.5 + 2j, ai)) <= 1e-11


@given(st.floats(0.1, 3.0), st.floats(0.1, 200.0))
@settings(max_examples=30, deadline=None)
def test_conjugate_symmetry(sigma, t):
    if abs(complex(sigma, t) - 1) < 1e-6:
        return
    z = riemann_zeta(complex(sigma, t))
    zc = riemann_zeta(complex(sigma, -t))
    assert zc == z.conjugate()


@pytest.mark.parametrize("sigma", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("t", [1.0, 5.0, 20.0])
def test_reflection_formula(sigma, t):
    s = complex(sigma, t)
    rhs = 2**s * math.pi ** (s - 1) * cmath.sin(math.pi * s / 2) * gamma(1 - s) * riemann_zeta(1 - s)
    lhs = riemann_zeta(s)
    assert abs(lhs - rhs) <= 1e-8 * abs(lhs)


@given(st.floats(-20.0, 40.0), st.floats(-40.0, 40.0))
@settings(max_examples=60)
def test_log_gamma_against_scipy(x, y):
    z = complex(x, y)
    if abs(z - round(x)) < 1e-3 and round(x) <= 0:
        return
    g = cmath.exp(log_gamma(z))
    ref = cmath.exp(complex(loggamma(z)))
    if abs(ref) < 1e-250 or abs(ref) > 1e250:
        return
    assert abs(g - ref) <= 1e-12 * abs(ref) * max(1.0, abs(z))


def test_prime_sum_examples(table):
    assert prime_sum_reciprocal(2, table) == 0.5
    assert prime_sum_reciprocal(10, table) == pytest.approx(1 / 2 + 1 / 3 + 1 / 5 + 1 / 7, abs=1e-15)
    assert prime_sum_logp(2, table) == pytest.approx(math.log(2) / 2, abs=1e-15)
    ps = primes_trial(100)
    assert len(ps) == 25
    assert prime_sum_logp(100, table) == pytest.approx(math.fsum(math.log(p) / p for p in ps), abs=1e-14)


def test_prime_sum_range_error(table):
    with pytest.raises(ValueError):
        prime_sum_reciprocal(2 * 10**7, table)
    with pytest.raises(ValueError):
        prime_sum_cos(100, -1.0, table)


def test_mertens_reciprocal_band(table):
    b1 = estimate_mertens_b1(table)
    x = 1e6
    assert abs(prime_sum_reciprocal(x, table) - math.log(math.log(x)) - b1) <= 2 / math.log(x)


def test_mertens_differences_shrink(table):
    dev = [prime_sum_reciprocal(10**j, table) - math.log(math.log(10**j)) for j in range(4, 8)]
    steps = [abs(dev[i + 1] - dev[i]) for i in range(len(dev) - 1)]
    assert all(steps[i + 1] < steps[i] for i in range(len(steps) - 1))


def test_logp_band(table):
    for x in [100, 1e3, 1e4, 1e5, 1e6, 1e7]:
        assert abs(prime_sum_logp(x, table) - math.log(x)) <= 3


def test_cos_sum_alpha_zero_is_reciprocal(table):
    for x in [10, 1e3, 1e5]:
        assert prime_sum_cos(x, 0.0, table) == prime_sum_reciprocal(x, table)


def test_cos_sum_bands(table):
    assert abs(prime_sum_cos(1e3, 1.0, table) - cos_sum_reference(1e3, 1.0)) <= 3
    assert abs(prime_sum_cos(1e5, 5.0, table) - math.log(1 / 5)) <= 4


def test_default_evaluator_is_shared():
    assert hurwitz_zeta(2, 1.0, DEFAULT_ZETA) == riemann_zeta(2)
