"""L(s, chi^(8d)) on and near the critical line, and the log-L upper bounds.

Two evaluation routes:

* ``l_value_hurwitz`` -- exact decomposition into Hurwitz zeta values, cost
  O(8d) zeta evaluations.  Used for validation and small moduli.
* ``l_value_afe`` -- the theta-function approximate functional equation for
  an even primitive character with root number +1.  Cost O(sqrt(8d |t|)).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import digamma

from .arith import PrimeTable, QuadChar, weight_A
from .zeta import DEFAULT_ZETA, ZetaEvaluator, log_gamma

__all__ = [
    "ShiftConfig",
    "LValue",
    "LEvaluationError",
    "HURWITZ_MAX_MODULUS",
    "AFE_CROSSOVER_MODULUS",
    "AFE_LENGTH_CONSTANT",
    "upper_incomplete_gamma",
    "l_value_hurwitz",
    "l_value_afe",
    "l_value",
    "l_values_critical",
    "completed_l",
    "functional_equation_residual",
    "h_of_n",
    "log_plus",
    "log_l_upper_bound",
    "prop25_margin",
]

HURWITZ_MAX_MODULUS = 200_000
AFE_CROSSOVER_MODULUS = 5000
AFE_LENGTH_CONSTANT = 3.0
_AFE_CHUNK = 1 << 20


class LEvaluationError(RuntimeError):
    pass


@dataclass(frozen=True)
class ShiftConfig:
    """Exponents a_1..a_k and shifts t_1..t_k for a shifted moment."""

    a_vec: tuple
    t_vec: tuple
    sigma: float = 0.5
    cap_Q: float = 1.0
    cap_A: float = 1.0

    def __post_init__(self):
        a = tuple(float(v) for v in self.a_vec)
        t = tuple(float(v) for v in self.t_vec)
        if not a:
            raise ValueError("need at least one exponent")
        if len(a) != len(t):
            raise ValueError(f"{len(a)} exponents but {len(t)} shifts")
        if any(v <= 0 for v in a):
            raise ValueError("exponents must be positive")
        if self.sigma < 0.5:
            raise ValueError("sigma must be >= 1/2")
        if self.cap_Q <= 0 or self.cap_A <= 0:
            raise ValueError("Q and A must be positive")
        object.__setattr__(self, "a_vec", a)
        object.__setattr__(self, "t_vec", t)

    @property
    def k(self) -> int:
        return len(self.a_vec)

    @property
    def a_total(self) -> float:
        return math.fsum(self.a_vec)

    def check_shifts(self, X: float) -> None:
        bound = X**self.cap_A
        bad = [t for t in self.t_vec if abs(t) > bound]
        if bad:
            raise ValueError(f"shifts {bad} exceed X^A = {bound:g}")


@dataclass(frozen=True)
class LValue:
    d: int
    s: complex
    value: complex
    method: str
    est_abs_error: float


def upper_incomplete_gamma(a: complex, x) -> np.ndarray:
    """Gamma(a, x) for complex scalar a and an array of positive reals x.

    Power series for x < |a| + 1, Legendre continued fraction (modified
    Lentz) otherwise.
    """
    a = complex(a)
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0):
        raise ValueError("x must be positive")
    out = np.empty(x.shape, dtype=np.complex128)
    use_series = x < abs(a) + 1.0
    if np.any(use_series):
        xs = x[use_series]
        term = np.full(xs.shape, 1.0 / a, dtype=np.complex128)
        total = term.copy()
        for k in range(1, 2000):
            term = term * xs / (a + k)
            total += term
            if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
                break
        else:
            raise LEvaluationError("incomplete gamma series did not converge")
        lower = np.exp(a * np.log(xs) - xs) * total
        out[use_series] = cmath.exp(log_gamma(a)) - lower
    if not np.all(use_series):
        xc = x[~use_series]
        tiny = 1e-300
        b = xc + 1.0 - a
        c = np.full(xc.shape, 1.0 / tiny, dtype=np.complex128)
        d = 1.0 / b
        h = d.copy()
        for i in range(1, 5000):
            an = -i * (i - a)
            b = b + 2.0
            d = an * d + b
            d = np.where(np.abs(d) < tiny, tiny, d)
            c = b + an / c
            c = np.where(np.abs(c) < tiny, tiny, c)
            d = 1.0 / d
            delta = d * c
            h = h * delta
            if np.all(np.abs(delta - 1.0) <= 1e-15):
                break
        else:
            raise LEvaluationError("incomplete gamma continued fraction did not converge")
        out[~use_series] = np.exp(a * np.log(xc) - xc) * h
    return out


def l_value_hurwitz(
    char: QuadChar,
    s: complex,
    evaluator: ZetaEvaluator = DEFAULT_ZETA,
    max_modulus: int = HURWITZ_MAX_MODULUS,
) -> LValue:
    """L(s, chi) = q^(-s) sum_{a=1}^{q} chi(a) zeta(s, a/q), q = 8d.

    At s = 1 the zeta poles cancel; there L(1, chi) = -(1/q) sum chi(a) psi(a/q).
    """
    s = complex(s)
    q = char.modulus
    if q > max_modulus:
        raise LEvaluationError(
            f"modulus {q} exceeds the Hurwitz-route bound {max_modulus}; use l_value_afe"
        )
    per = char.period()
    residues = np.flatnonzero(per).astype(np.int64)
    signs = per[residues].astype(np.float64)
    if abs(s - 1.0) <= 1e-12:
        value = -math.fsum(signs * digamma(residues / q)) / q
        return LValue(char.d, s, complex(value, 0.0), "hurwitz", q * evaluator.target_rel_error)
    zetas = evaluator.hurwitz(s, residues / q)
    total = np.sum(signs * zetas)
    value = complex(cmath.exp(-s * math.log(q)) * total)
    if s.imag == 0:
        value = complex(value.real, 0.0)
    return LValue(char.d, s, value, "hurwitz", q * evaluator.target_rel_error)


def _afe_length(q: int, t: float, C: float) -> int:
    return int(math.ceil(C * math.sqrt(q * (abs(t) + 1.0))))


def completed_l(q: int, s: complex, L: complex) -> complex:
    """Lambda(s) = (q/pi)^(s/2) Gamma(s/2) L(s)."""
    return cmath.exp(0.5 * s * math.log(q / math.pi) + log_gamma(0.5 * s)) * L


def _afe_sum(q: int, chi_n: np.ndarray, n: np.ndarray, s: complex) -> complex:
    """Lambda(s) = sum_n chi(n) [ (q/pi)^{s/2} n^{-s} G(s/2, x) + (q/pi)^{(1-s)/2} n^{s-1} G((1-s)/2, x) ],
    x = pi n^2 / q, G the upper incomplete gamma."""
    keep = chi_n != 0
    n = n[keep].astype(np.float64)
    c = chi_n[keep].astype(np.float64)
    x = math.pi * n * n / q
    logn = np.log(n)
    lq = math.log(q / math.pi)
    first = np.exp(0.5 * s * lq - s * logn) * upper_incomplete_gamma(0.5 * s, x)
    sp = 1.0 - s
    if s.real == 0.5:
        second = np.conj(first)
    else:
        second = np.exp(0.5 * sp * lq - sp * logn) * upper_incomplete_gamma(0.5 * sp, x)
    return complex(np.sum(c * (first + second)))


def l_value_afe(
    char: QuadChar,
    t: float,
    sigma: float = 0.5,
    C: float = AFE_LENGTH_CONSTANT,
    crossover: int = AFE_CROSSOVER_MODULUS,
    force: bool = False,
) -> LValue:
    """Smoothed approximate-functional-equation value of L(sigma + it, chi).

    Moduli below ``crossover`` fall back to the Hurwitz route unless
    ``force`` is set.
    """
    s = complex(sigma, t)
    q = char.modulus
    if q < crossover and not force:
        return l_value_hurwitz(char, s)
    N = _afe_length(q, t, C)
    n = np.arange(1, N + 1, dtype=np.int64)
    lam = _afe_sum(q, char.values(n), n, s)
    norm = cmath.exp(0.5 * s * math.log(q / math.pi) + log_gamma(0.5 * s))
    value = lam / norm
    if t == 0 and sigma == 0.5:
        value = complex(value.real, 0.0)
    tail = math.exp(-math.pi * N * N / q)
    return LValue(char.d, s, value, "afe", tail * N / abs(norm))


def l_value(char: QuadChar, s: complex) -> LValue:
    """Route selection: AFE on the critical line for large moduli, else Hurwitz."""
    s = complex(s)
    if char.modulus >= AFE_CROSSOVER_MODULUS:
        return l_value_afe(char, s.imag, sigma=s.real, force=True)
    return l_value_hurwitz(char, s)


def l_values_critical(
    ds: Sequence[int], t: float, C: float = AFE_LENGTH_CONSTANT, crossover: int = AFE_CROSSOVER_MODULUS
) -> np.ndarray:
    """L(1/2 + it, chi^(8d)) for every d in ``ds`` (complex array, same order).

    Large moduli are evaluated together: the incomplete gamma parameter
    s/2 is shared, so all (d, n) pairs go through one vectorised call.
    """
    ds = [int(d) for d in ds]
    out = np.empty(len(ds), dtype=np.complex128)
    s = complex(0.5, t)
    big = []
    for i, d in enumerate(ds):
        char = QuadChar(d)
        if char.modulus < crossover:
            out[i] = l_value_hurwitz(char, s).value
        else:
            big.append(i)
    if big:
        lq_all, logn_all, chi_all, x_all, owner = [], [], [], [], []
        for i in big:
            char = QuadChar(ds[i])
            q = char.modulus
            n = np.arange(1, _afe_length(q, t, C) + 1, dtype=np.int64)
            c = char.values(n)
            keep = c != 0
            n = n[keep].astype(np.float64)
            chi_all.append(c[keep].astype(np.float64))
            logn_all.append(np.log(n))
            x_all.append(math.pi * n * n / q)
            lq_all.append(np.full(n.shape, math.log(q / math.pi)))
            owner.append(np.full(n.shape, i, dtype=np.int64))
        chi_all = np.concatenate(chi_all)
        logn_all = np.concatenate(logn_all)
        x_all = np.concatenate(x_all)
        lq_all = np.concatenate(lq_all)
        owner = np.concatenate(owner)
        terms = np.empty(x_all.shape, dtype=np.complex128)
        for lo in range(0, len(x_all), _AFE_CHUNK):
            sl = slice(lo, lo + _AFE_CHUNK)
            g = upper_incomplete_gamma(0.5 * s, x_all[sl])
            first = np.exp(0.5 * s * lq_all[sl] - s * logn_all[sl]) * g
            terms[sl] = chi_all[sl] * 2.0 * first.real
        starts = np.flatnonzero(np.r_[True, owner[1:] != owner[:-1]])
        lam = np.add.reduceat(terms, starts)
        idx = owner[starts]
        lg = log_gamma(0.5 * s)
        for j, i in enumerate(idx):
            q = 8 * ds[i]
            out[i] = lam[j] / cmath.exp(0.5 * s * math.log(q / math.pi) + lg)
    if t == 0:
        out = out.real + 0j
    return out


def functional_equation_residual(
    char: QuadChar, s: complex, eps_floor: float = 1e-300
) -> float:
    """|Lambda(s) - Lambda(1-s)| / max(|Lambda(s)|, eps_floor), Hurwitz route."""
    s = complex(s)
    q = char.modulus
    lam_s = completed_l(q, s, l_value_hurwitz(char, s).value)
    s1 = 1.0 - s
    lam_1 = completed_l(q, s1, l_value_hurwitz(char, s1).value)
    return abs(lam_s - lam_1) / max(abs(lam_s), eps_floor)


def h_of_n(n, cfg: ShiftConfig):
    """h(n) = (1/2) sum_m a_m cos(t_m log n); scalar or array n."""
    logn = np.log(np.asarray(n, dtype=np.float64))
    total = sum(a * np.cos(t * logn) for a, t in zip(cfg.a_vec, cfg.t_vec))
    total = 0.5 * total
    return float(total) if np.ndim(total) == 0 else total


def log_plus(t: float) -> float:
    """max(0, log|t|), with log+ 0 = 0."""
    t = abs(t)
    return max(0.0, math.log(t)) if t > 0 else 0.0


def _sigma0(sigma: float, x: float) -> float:
    return 0.5 + max(sigma - 0.5, 1.0 / math.log(x))


def log_l_upper_bound(
    char: QuadChar, sigma: float, t: float, x: float, table: PrimeTable
) -> float:
    """Explicit part of the GRH upper bound for log|L(sigma + it, chi)|.

    Re sum_{n<=x} chi(n) Lambda(n) n^{-sigma0-it} log(x/n)/(log x log n)
    + (log 8d + log+ t)/log x, with sigma0 = 1/2 + max(sigma-1/2, 1/log x).
    The O(1/log x) term is not included.
    """
    if sigma < 0.5:
        raise ValueError("sigma must be >= 1/2")
    if x < 2:
        raise ValueError("x must be >= 2")
    table.check_range(x)
    lx = math.log(x)
    s0 = _sigma0(sigma, x)
    n = np.arange(2, int(math.floor(x)) + 1, dtype=np.int64)
    lam = table.lambda_vm[n]
    keep = lam > 0
    n, lam = n[keep], lam[keep]
    chi = char.values(n).astype(np.float64)
    logn = np.log(n.astype(np.float64))
    terms = chi * lam * np.exp(-s0 * logn) * np.cos(t * logn) * (lx - logn) / (lx * logn)
    return math.fsum(terms) + (math.log(char.modulus) + log_plus(t)) / lx


def prop25_margin(
    char: QuadChar,
    cfg: ShiftConfig,
    x: float,
    X: float,
    table: PrimeTable,
    l_values: Sequence[complex] | None = None,
) -> float:
    """RHS minus LHS of the log|A(d) L| inequality, O(1) term excluded.

    LHS = sum_m a_m log|A(d) L(sigma + i t_m, chi)|.
    RHS = 2 sum_{p<=x} h(p) chi(p) p^{-sigma0} log(x/p)/log x
          + sum_{p<=sqrt x} h(p^2) p^{-2 sigma0}     (sigma0 as above)
          + (Q+1) a log X / log x.
    """
    table.check_range(x)
    cfg.check_shifts(X)
    lx = math.log(x)
    s0 = _sigma0(cfg.sigma, x)
    if l_values is None:
        l_values = [l_value(char, complex(cfg.sigma, t)).value for t in cfg.t_vec]
    A = weight_A(char.d)
    lhs = math.fsum(a * math.log(A * abs(L)) for a, L in zip(cfg.a_vec, l_values))
    p = table.primes_le(x)
    pf = p.astype(np.float64)
    logp = np.log(pf)
    chi = char.values(p).astype(np.float64)
    first = 2.0 * h_of_n(pf, cfg) * chi * np.exp(-s0 * logp) * (lx - logp) / lx
    p2 = table.primes_le(math.sqrt(x)).astype(np.float64)
    second = h_of_n(p2 * p2, cfg) * np.exp(-2.0 * s0 * np.log(p2))
    rhs = (
        math.fsum(first)
        + math.fsum(second)
        + (cfg.cap_Q + 1.0) * cfg.a_total * math.log(X) / lx
    )
    return rhs - lhs
