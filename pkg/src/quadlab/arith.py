"""Integer arithmetic: sieves, Jacobi symbols and the characters chi^(8d).

Everything here is exact integer work except the von Mangoldt table and the
weight A(d), which are floats.  Arrays are numpy; scalar helpers take and
return Python ints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

__all__ = [
    "PrimeTable",
    "QuadChar",
    "prime_table",
    "primes_up_to",
    "jacobi_symbol",
    "jacobi_array",
    "chi_8d",
    "sieve_squarefree_odd",
    "is_squarefree",
    "is_square",
    "factorize",
    "weight_A",
    "weight_A_array",
    "w_factorial",
    "PERIOD_CACHE_BOUND",
    "SEGMENT_LENGTH",
]

PERIOD_CACHE_BOUND = 2**20
SEGMENT_LENGTH = 2**20


def primes_up_to(n: int) -> np.ndarray:
    """Sieve of Eratosthenes on odd numbers; returns int64 primes <= n."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    # index i <-> odd number 2i+1
    size = (n - 1) // 2 + 1
    odd = np.ones(size, dtype=bool)
    odd[0] = False
    for i in range(1, (math.isqrt(n) - 1) // 2 + 1):
        if odd[i]:
            p = 2 * i + 1
            odd[p * p // 2 :: p] = False
    out = 2 * np.flatnonzero(odd).astype(np.int64) + 1
    return np.concatenate(([2], out)).astype(np.int64)


class PrimeTable:
    """Primes up to ``limit`` with mu, Omega and Lambda attached.

    Only the prime list is built eagerly; the multiplicative tables are
    computed on first access and then cached.  Instances are never mutated
    after construction.
    """

    def __init__(self, limit: int):
        if limit < 2:
            raise ValueError(f"PrimeTable limit must be >= 2, got {limit}")
        self.limit = int(limit)
        self.primes = primes_up_to(self.limit)
        self.primes.setflags(write=False)

    def __repr__(self):
        return f"PrimeTable(limit={self.limit}, nprimes={len(self.primes)})"

    def check_range(self, x: float, what: str = "x") -> None:
        if x > self.limit:
            raise ValueError(f"{what}={x} exceeds prime table limit {self.limit}")

    def primes_le(self, x: float) -> np.ndarray:
        self.check_range(x)
        return self.primes[: np.searchsorted(self.primes, math.floor(x), side="right")]

    def primes_in(self, lo: float, hi: float) -> np.ndarray:
        """Primes p with lo < p <= hi."""
        self.check_range(hi, "hi")
        i = np.searchsorted(self.primes, math.floor(lo), side="right")
        j = np.searchsorted(self.primes, math.floor(hi), side="right")
        return self.primes[i:j]

    @cached_property
    def mobius(self) -> np.ndarray:
        mu = np.ones(self.limit + 1, dtype=np.int8)
        mu[0] = 0
        for p in self.primes:
            p = int(p)
            mu[p::p] *= -1
            if p * p <= self.limit:
                mu[p * p :: p * p] = 0
        mu.setflags(write=False)
        return mu

    @cached_property
    def omega_big(self) -> np.ndarray:
        om = np.zeros(self.limit + 1, dtype=np.int16)
        for p in self.primes:
            q = int(p)
            while q <= self.limit:
                om[q :: q] += 1
                q *= int(p)
        om.setflags(write=False)
        return om

    @cached_property
    def lambda_vm(self) -> np.ndarray:
        lam = np.zeros(self.limit + 1, dtype=np.float64)
        for p in self.primes:
            p = int(p)
            lp = math.log(p)
            q = p
            while q <= self.limit:
                lam[q] = lp
                q *= p
        lam.setflags(write=False)
        return lam


@lru_cache(maxsize=8)
def prime_table(limit: int) -> PrimeTable:
    """Shared, cached PrimeTable."""
    return PrimeTable(limit)


def jacobi_symbol(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n >= 1 by the binary reciprocity algorithm."""
    if n <= 0 or n % 2 == 0:
        raise ValueError(f"Jacobi symbol needs odd positive n, got {n}")
    a %= n
    acc = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                acc = -acc
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            acc = -acc
        a %= n
    return acc if n == 1 else 0


def jacobi_array(a, n) -> np.ndarray:
    """Vectorised Jacobi symbol over broadcast int arrays (n odd, positive)."""
    a, n = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(n, dtype=np.int64))
    shape = a.shape
    a = a.ravel()
    n = n.ravel()
    if np.any(n <= 0) or np.any(n % 2 == 0):
        raise ValueError("Jacobi symbol needs odd positive n")
    out = np.zeros(a.size, dtype=np.int8)
    idx = np.arange(a.size)
    a = np.mod(a, n)
    acc = np.ones(a.size, dtype=np.int8)
    while idx.size:
        done = a == 0
        if np.any(done):
            out[idx[done]] = np.where(n[done] == 1, acc[done], 0)
            keep = ~done
            idx, a, n, acc = idx[keep], a[keep], n[keep], acc[keep]
            if not idx.size:
                break
        # strip all factors of two at once
        low = a & -a
        tz = np.log2(low.astype(np.float64)).astype(np.int64)
        a = a // low
        r8 = n % 8
        flip = (tz % 2 == 1) & ((r8 == 3) | (r8 == 5))
        flip ^= (a % 4 == 3) & (n % 4 == 3)
        acc = np.where(flip, -acc, acc).astype(np.int8)
        a, n = n % a, a
    return out.reshape(shape)


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation by trial division."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_squarefree(n: int) -> bool:
    return n >= 1 and all(e == 1 for e in factorize(n).values())


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


@dataclass(frozen=True)
class QuadChar:
    """The real primitive character chi^(8d) = (8d/.) for odd square-free d."""

    d: int

    def __post_init__(self):
        d = self.d
        if not isinstance(d, (int, np.integer)) or isinstance(d, bool):
            raise TypeError(f"d must be an integer, got {d!r}")
        if d < 1 or d % 2 == 0 or not is_squarefree(int(d)):
            raise ValueError(f"d={d} is not an odd square-free positive integer")
        object.__setattr__(self, "d", int(d))

    @property
    def modulus(self) -> int:
        return 8 * self.d

    def __call__(self, n: int) -> int:
        return chi_8d(self, n)

    def values(self, n) -> np.ndarray:
        """chi(n) for an array of positive integers n."""
        n = np.asarray(n, dtype=np.int64)
        q = self.modulus
        # a period table only pays off when the scan is comparable to 8d
        if q <= PERIOD_CACHE_BOUND and 8 * n.size >= q:
            return self.period()[n % q]
        out = np.zeros(n.shape, dtype=np.int8)
        odd = n % 2 == 1
        out[odd] = jacobi_array(q, n[odd])
        return out

    def period(self) -> np.ndarray:
        """chi(0), ..., chi(8d-1) as int8 (read-only, cached)."""
        return _period(self.d)


@lru_cache(maxsize=256)
def _period(d: int) -> np.ndarray:
    # (8d/n) = (2/n) (n/d) (-1)^{(d-1)/2 (n-1)/2} for odd n; (n/d) has period d
    q = 8 * d
    n = np.arange(1, q, 2, dtype=np.int64)
    small = jacobi_array(np.arange(d, dtype=np.int64), d)
    two = np.where((n % 8 == 1) | (n % 8 == 7), 1, -1)
    recip = 1 - 2 * ((((d - 1) // 2) * ((n - 1) // 2)) % 2)
    out = np.zeros(q, dtype=np.int8)
    out[1::2] = two * small[n % d] * recip
    out.setflags(write=False)
    return out


def chi_8d(char: QuadChar, n: int) -> int:
    """chi^(8d)(n): zero for even n, otherwise the Jacobi symbol (8d/n)."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if n % 2 == 0:
        return 0
    return jacobi_symbol(char.modulus, n)


def sieve_squarefree_odd(X: int, segment: int = SEGMENT_LENGTH) -> np.ndarray:
    """All odd square-free d with 1 <= d <= X, via a segmented square sieve."""
    X = int(X)
    if X < 1:
        return np.zeros(0, dtype=np.int64)
    odd_primes = primes_up_to(math.isqrt(X))[1:]
    squares = odd_primes * odd_primes
    chunks = []
    for lo in range(1, X + 1, segment):
        hi = min(lo + segment, X + 1)  # [lo, hi)
        keep = np.ones(hi - lo, dtype=bool)
        for sq in squares:
            sq = int(sq)
            if sq >= hi:
                break
            start = ((lo + sq - 1) // sq) * sq
            keep[start - lo :: sq] = False
        vals = np.arange(lo, hi, dtype=np.int64)
        chunks.append(vals[keep & (vals % 2 == 1)])
    return np.concatenate(chunks)


def weight_A(d: int) -> float:
    """A(d) = prod_{p | d} (1 - 1/(2p)) for odd square-free d."""
    if d < 1 or d % 2 == 0 or not is_squarefree(d):
        raise ValueError(f"A(d) needs odd square-free d, got {d}")
    return math.prod(1.0 - 0.5 / p for p in factorize(d))


def weight_A_array(limit: int) -> np.ndarray:
    """A(n) for 0 <= n <= limit (product over all p | n; A(0) unused)."""
    logA = np.zeros(limit + 1, dtype=np.float64)
    for p in primes_up_to(limit):
        p = int(p)
        logA[p::p] += math.log1p(-0.5 / p)
    return np.exp(logA)


def w_factorial(n: int, table: PrimeTable | None = None) -> int:
    """The multiplicative function with w(p^k) = k!."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if table is not None:
        table.check_range(n, "n")
    return math.prod(math.factorial(e) for e in factorize(n).values())
