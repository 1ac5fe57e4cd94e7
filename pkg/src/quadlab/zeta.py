"""Riemann and Hurwitz zeta by Euler-Maclaurin, a Lanczos log-gamma, and
the Mertens-type prime sums.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import bernoulli

from .arith import PrimeTable

__all__ = [
    "ZetaEvaluator",
    "DEFAULT_ZETA",
    "riemann_zeta",
    "hurwitz_zeta",
    "log_gamma",
    "gamma",
    "prime_sum_reciprocal",
    "prime_sum_logp",
    "prime_sum_cos",
    "cos_sum_reference",
    "estimate_mertens_b1",
    "PoleError",
]


class PoleError(ValueError):
    """Evaluation requested too close to the pole at s = 1."""


# Lanczos coefficients, g = 671/128, fourteen terms (Numerical Recipes 3rd ed.)
_LANCZOS_G = 5.24218750000000000
_LANCZOS_C0 = 0.999999999999997092
_LANCZOS_COF = (
    57.1562356658629235,
    -59.5979603554754912,
    14.1360979747417471,
    -0.491913816097620199,
    0.339946499848118887e-4,
    0.465236289270485756e-4,
    -0.983744753048795646e-4,
    0.158088703224912494e-3,
    -0.210264441724104883e-3,
    0.217439618115212643e-3,
    -0.164318106536763890e-3,
    0.844182239838527433e-4,
    -0.261908384015814087e-4,
    0.368991826595316234e-5,
)
_SQRT_2PI = 2.5066282746310005


def log_gamma(z: complex) -> complex:
    """log Gamma(z) via the Lanczos approximation (reflection for Re z < 1/2).

    The imaginary part is not reduced to the principal branch; exp() of the
    result is Gamma(z).
    """
    z = complex(z)
    if z.real < 0.5:
        # Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return cmath.log(math.pi / cmath.sin(math.pi * z)) - log_gamma(1.0 - z)
    tmp = z + _LANCZOS_G
    tmp = (z + 0.5) * cmath.log(tmp) - tmp
    ser = _LANCZOS_C0
    y = z
    for c in _LANCZOS_COF:
        y += 1.0
        ser += c / y
    return tmp + cmath.log(_SQRT_2PI * ser / z)


def gamma(z: complex) -> complex:
    return cmath.exp(log_gamma(z))


@dataclass(frozen=True)
class ZetaEvaluator:
    """Euler-Maclaurin evaluation of zeta(s, a).

    ``euler_maclaurin_terms`` is the minimum number of directly summed terms;
    it grows with |s| so the Bernoulli tail stays below ``target_rel_error``.
    """

    euler_maclaurin_terms: int = 64
    bernoulli_order: int = 20
    target_rel_error: float = 1e-12

    def __post_init__(self):
        if self.bernoulli_order <= 0 or self.bernoulli_order % 2:
            raise ValueError("bernoulli_order must be a positive even integer")
        if self.euler_maclaurin_terms < 1:
            raise ValueError("euler_maclaurin_terms must be positive")

    def _n_terms(self, s: complex) -> int:
        return max(self.euler_maclaurin_terms, int(math.ceil(abs(s))) + self.bernoulli_order)

    def hurwitz(self, s: complex, a):
        """zeta(s, a) for scalar s and scalar or array a in (0, 1]."""
        s = complex(s)
        if abs(s - 1.0) <= 1e-12:
            raise PoleError(f"zeta(s, a) has a pole at s=1 (got s={s})")
        if s.real <= -1.0:
            raise ValueError(f"Re(s) > -1 required, got {s}")
        arr = np.asarray(a, dtype=np.float64)
        if np.any(arr <= 0.0) or np.any(arr > 1.0):
            raise ValueError("Hurwitz parameter a must lie in (0, 1]")
        if s.imag < 0:
            return np.conj(self.hurwitz(s.conjugate(), a))
        N = self._n_terms(s)
        acc = np.zeros(arr.shape, dtype=np.complex128)
        for n in range(N):
            acc += np.power(arr + n, -s)
        tail_base = arr + N
        acc += np.power(tail_base, 1.0 - s) / (s - 1.0)
        pw = np.power(tail_base, -s)
        acc += 0.5 * pw
        B = bernoulli(self.bernoulli_order)
        rising = s  # s (s+1) ... (s + 2k - 2)
        inv_sq = 1.0 / (tail_base * tail_base)
        term_pow = pw / tail_base  # (N+a)^(-s-1)
        for k in range(1, self.bernoulli_order // 2 + 1):
            acc += B[2 * k] / math.factorial(2 * k) * rising * term_pow
            rising *= (s + 2 * k - 1) * (s + 2 * k)
            term_pow = term_pow * inv_sq
        return acc if acc.ndim else complex(acc)

    def riemann(self, s: complex) -> complex:
        s = complex(s)
        if s.real <= 0.0:
            raise ValueError(f"riemann_zeta needs Re(s) > 0, got {s}")
        return complex(self.hurwitz(s, 1.0))


DEFAULT_ZETA = ZetaEvaluator()


def riemann_zeta(s: complex, evaluator: ZetaEvaluator = DEFAULT_ZETA) -> complex:
    return evaluator.riemann(s)


def hurwitz_zeta(s: complex, a, evaluator: ZetaEvaluator = DEFAULT_ZETA):
    return evaluator.hurwitz(s, a)


def prime_sum_reciprocal(x: float, table: PrimeTable) -> float:
    """sum_{p <= x} 1/p (correctly rounded)."""
    p = table.primes_le(x).astype(np.float64)
    return math.fsum(1.0 / p)


def prime_sum_logp(x: float, table: PrimeTable) -> float:
    """sum_{p <= x} log(p)/p."""
    p = table.primes_le(x).astype(np.float64)
    return math.fsum(np.log(p) / p)


def prime_sum_cos(x: float, alpha: float, table: PrimeTable) -> float:
    """sum_{p <= x} cos(alpha log p)/p."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    p = table.primes_le(x).astype(np.float64)
    return math.fsum(np.cos(alpha * np.log(p)) / p)


def cos_sum_reference(x: float, alpha: float, evaluator: ZetaEvaluator = DEFAULT_ZETA) -> float:
    """log|zeta(1 + 1/log x + i alpha)|, the comparison value for prime_sum_cos."""
    return math.log(abs(evaluator.riemann(complex(1.0 + 1.0 / math.log(x), alpha))))


def estimate_mertens_b1(table: PrimeTable) -> float:
    """sum_{p <= P} 1/p - log log P at the table limit P."""
    return prime_sum_reciprocal(table.limit, table) - math.log(math.log(table.limit))
