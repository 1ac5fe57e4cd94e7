"""Independent reference implementations used only by the tests."""

from __future__ import annotations

import math

import mpmath


def legendre_euler(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p by Euler's criterion."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def trial_factor(n: int) -> list[int]:
    """Prime factors of n with multiplicity, by plain trial division."""
    out = []
    f = 2
    while f * f <= n:
        while n % f == 0:
            out.append(f)
            n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def jacobi_by_factoring(a: int, n: int) -> int:
    """(a/n) as the product of Legendre symbols over the factorisation of n."""
    acc = 1
    for p in trial_factor(n):
        acc *= legendre_euler(a, p)
    return acc


def chi8d_oracle(d: int, n: int) -> int:
    return 0 if n % 2 == 0 else jacobi_by_factoring(8 * d, n)


def is_squarefree_oracle(n: int) -> bool:
    fs = trial_factor(n)
    return len(fs) == len(set(fs))


def odd_squarefree_oracle(X: int) -> list[int]:
    return [d for d in range(1, X + 1, 2) if is_squarefree_oracle(d)]


def l_value_mpmath(d: int, s: complex) -> complex:
    """L(s, chi^(8d)) via mpmath's periodic Dirichlet L-function."""
    q = 8 * d
    chi = [chi8d_oracle(d, n) if n else 0 for n in range(q)]
    with mpmath.workdps(30):
        return complex(mpmath.dirichlet(s, chi))


def hurwitz_mpmath(s: complex, a: float) -> complex:
    with mpmath.workdps(30):
        return complex(mpmath.zeta(s, a))


def primes_trial(n: int) -> list[int]:
    return [k for k in range(2, n + 1) if all(k % f for f in range(2, math.isqrt(k) + 1))]


def jacobi_table_oracle(n: int) -> list[int]:
    """(a/n) for a = 0..n-1, from quadratic-residue sets of the prime factors of n."""
    out = [1] * n
    for p in trial_factor(n):
        squares = {(x * x) % p for x in range(1, p)}
        for a in range(n):
            r = a % p
            out[a] *= 0 if r == 0 else (1 if r in squares else -1)
    return out
