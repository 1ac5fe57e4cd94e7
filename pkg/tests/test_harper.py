import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import chi8d_oracle, odd_squarefree_oracle
from quadlab.arith import PrimeTable, QuadChar
from quadlab.harper import (
    THRESHOLD_SCALE,
    DegenerateScheduleError,
    build_schedule,
    census,
    classify_d,
    classify_family,
    companion_h1_sum,
    h_prime,
    m_lj,
    m_matrix,
    s_weight,
    truncated_exp,
)
from quadlab.lfunc import ShiftConfig


@pytest.fixture(scope="module")
def table():
    return PrimeTable(10**6)


CFG = ShiftConfig((1.0,), (0.0,))


# --- schedule ------------------------------------------------------------------


def test_degenerate_schedule_raises():
    X = math.exp(math.exp(2))  # log log X = 2, alpha_1 = 1/4 > 1/10
    with pytest.raises(DegenerateScheduleError) as err:
        build_schedule(X, const_M=1)
    assert err.value.alpha1 == pytest.approx(0.25)
    assert "strict=False" in str(err.value)


def test_degenerate_fallback_is_flagged():
    s = build_schedule(1e4, strict=False)
    assert s.degenerate and s.J == 1
    assert s.header()["degenerate"] is True
    assert s.alpha(1) == pytest.approx(1 / math.log(math.log(1e4)) ** 2)
    assert s.ell(1) == 8
    assert s.ranges[0][0] == 1.0


def test_large_X_schedule():
    X = 1e300
    s = build_schedule(X)
    ll = math.log(math.log(X))
    assert s.J == 2 and not s.degenerate
    assert s.alpha(1) == pytest.approx(1 / ll**2)
    assert s.alpha(1) <= 0.1 < s.alpha(2)
    assert s.ell(1) == 2 * math.ceil(s.alpha(1) ** -0.75)


@given(st.floats(20, 300), st.integers(1, 3), st.floats(0, 2))
def test_schedule_invariants(log10X, M, B):
    X = 10.0**log10X
    s = build_schedule(X, const_M=M, const_B=B, strict=False)
    assert all(e % 2 == 0 and e >= 2 for e in s.ells)
    assert all(s.ells[i] > s.ells[i + 1] for i in range(len(s.ells) - 1))
    assert all(s.alphas[i] < s.alphas[i + 1] for i in range(len(s.alphas) - 1))
    for a, b in zip(s.ranges, s.ranges[1:]):
        assert a[1] == b[0]
    if not s.degenerate:
        assert s.alpha(s.J - 1) <= 10.0**-M


def test_schedule_validation():
    with pytest.raises(ValueError):
        build_schedule(2.0)
    with pytest.raises(ValueError):
        build_schedule(1e300, const_M=0)
    with pytest.raises(ValueError):
        build_schedule(1e300, const_B=-1)


# --- truncated exponential ---------------------------------------------------------


def test_truncated_exp_examples():
    assert truncated_exp(0, 3.7) == 1.0
    assert truncated_exp(2, 1.0) == 2.5
    assert truncated_exp(4, 0.0) == 1.0
    with pytest.raises(ValueError):
        truncated_exp(-1, 1.0)


@given(st.integers(2, 40).map(lambda k: 2 * (k // 2)), st.floats(-5, 5))
def test_truncated_exp_remainder(ell, x):
    # Lagrange remainder: |e^x - E_ell(x)| <= e^max(x,0) |x|^(ell+1)/(ell+1)!
    bound = math.exp(max(x, 0)) * abs(x) ** (ell + 1) / math.factorial(ell + 1)
    assert abs(math.exp(x) - truncated_exp(ell, x)) <= bound * (1 + 1e-12) + 1e-13 * math.exp(abs(x))


def test_truncated_exp_positive_for_even_ell():
    for ell in (2, 4, 8, 16):
        for x in np.linspace(-30, 30, 121):
            assert truncated_exp(ell, float(x)) > 0


def test_truncated_exp_converges():
    x = 2.5
    errs = [abs(math.exp(x) - truncated_exp(ell, x)) for ell in (2, 4, 8, 16)]
    assert all(a > b for a, b in zip(errs, errs[1:]))


# --- coefficients ---------------------------------------------------------------------


@given(st.integers(2, 10**6), st.floats(0.5, 2), st.floats(3, 1e6))
def test_h_prime_bounded(p, sigma, x):
    assert abs(float(h_prime(p, sigma, x, CFG))) <= 1 + 1e-12


def test_s_weight():
    assert float(s_weight(1, 100.0)) == 1.0
    assert float(s_weight(100, 100.0)) == 0.0


def test_m_lj_against_direct_loop(table):
    s = build_schedule(1e300)
    cfg = ShiftConfig((1.0, 1.0), (0.0, 2.0))
    for d in (1, 3, 105):
        char = QuadChar(d)
        for l, j in [(1, 1), (1, 2)]:
            lo, hi = s.ranges[l - 1]
            hi = min(hi, 1e4)
            x = s.x_of(j)
            ref = 0.0
            # restrict to the primes the table can reach; the check is on the formula
            for p in range(2, int(hi) + 1):
                if p <= lo or any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
                    continue
                h = float(h_prime(p, cfg.sigma, x, cfg))
                ref += h * chi8d_oracle(d, p) * float(s_weight(p, x)) / math.sqrt(p)
            if s.ranges[l - 1][1] <= 1e4:
                assert m_lj(char, l, j, cfg, s, table) == pytest.approx(ref, abs=1e-12)


def test_m_lj_trivial_bound(table):
    s = build_schedule(1e4, strict=False)
    lo, hi = s.ranges[0]
    bound = sum(1 / math.sqrt(p) for p in table.primes_in(lo, hi))
    for d in odd_squarefree_oracle(500):
        assert abs(m_lj(QuadChar(d), 1, 1, CFG, s, table)) <= bound + 1e-12


def test_m_lj_index_errors(table):
    s = build_schedule(1e4, strict=False)
    with pytest.raises(IndexError):
        m_lj(QuadChar(1), 2, 1, CFG, s, table)
    with pytest.raises(IndexError):
        m_lj(QuadChar(1), 1, 2, CFG, s, table)


def test_m_matrix_matches_scalar(table):
    s = build_schedule(1e4, strict=False)
    ds = odd_squarefree_oracle(600)
    mat = m_matrix(ds, CFG, s, table)
    for i, d in enumerate(ds):
        assert mat[(1, 1)][i] == pytest.approx(m_lj(QuadChar(d), 1, 1, CFG, s, table), abs=1e-13)


def test_m_matrix_threads_identical(table):
    s = build_schedule(1e4, strict=False)
    ds = odd_squarefree_oracle(3000)
    a = m_matrix(ds, CFG, s, table, threads=1)[(1, 1)]
    b = m_matrix(ds, CFG, s, table, threads=4)[(1, 1)]
    assert np.array_equal(a, b)


# --- classification ----------------------------------------------------------------------


def test_partition_is_exhaustive(table):
    s = build_schedule(1e4, strict=False)
    ds, cls = classify_family(1e4, CFG, s, table)
    assert ds.tolist() == odd_squarefree_oracle(10**4)
    assert cls.min() >= 0 and cls.max() <= s.J
    assert np.bincount(cls, minlength=s.J + 1).sum() == ds.size


def test_classify_rule_by_hand(table):
    s = build_schedule(1e4, strict=False)
    thr = s.ell(1) / THRESHOLD_SCALE
    for d in odd_squarefree_oracle(300):
        m = m_lj(QuadChar(d), 1, 1, CFG, s, table)
        expected = 0 if abs(CFG.a_total * m) > thr else 1
        assert classify_d(QuadChar(d), CFG, s, table) == expected


def test_classify_d_agrees_with_family(table):
    s = build_schedule(1e4, strict=False)
    ds, cls = classify_family(2000, CFG, s, table)
    for d, c in list(zip(ds, cls))[::17]:
        assert classify_d(QuadChar(int(d)), CFG, s, table) == c


def test_census_rows(table):
    s = build_schedule(1e4, strict=False)
    rows = census(1e4, CFG, s, table)
    assert [r["class_j"] for r in rows] == list(range(s.J + 1))
    assert sum(r["count"] for r in rows) == len(odd_squarefree_oracle(10**4))
    assert math.fsum(r["fraction"] for r in rows) == pytest.approx(1.0)
    assert set(rows[0]) == {"class_j", "count", "fraction", "X", "M", "B", "sigma", "shifts"}
    assert rows[0]["shifts"] == "1.0@0.0"


def test_census_range_check():
    s = build_schedule(1e300)
    with pytest.raises(ValueError):
        classify_family(100, CFG, s, PrimeTable(1000))


def test_companion_sum(table):
    s = build_schedule(1e4, strict=False)
    v = companion_h1_sum(1, CFG, s, table)
    x = s.x_of(1)
    ps = [p for p in range(2, int(math.sqrt(x)) + 1) if all(p % q for q in range(2, p))]
    # a = 1, t = 0: h(p^2) = 1/2, so each term is (1/2) p^(-1 - 2/log x)
    assert v == pytest.approx(0.5 * sum(1 / (p ** (2 / math.log(x)) * p) for p in ps), rel=1e-12)
    with pytest.raises(IndexError):
        companion_h1_sum(2, CFG, s, table)
