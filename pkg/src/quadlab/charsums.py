"""Character sums over the family chi^(8d), smoothing weights and their
Mellin transforms, and the main terms of the smoothed d-sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import expit

from ._parallel import exact_sum, map_blocks
from .arith import PrimeTable, QuadChar, factorize, is_square, jacobi_array, sieve_squarefree_odd
from .zeta import riemann_zeta

__all__ = [
    "SmoothingFunction",
    "MainTermData",
    "QuadratureError",
    "BudgetExceeded",
    "TruncationError",
    "bump_phi",
    "edge_phi_u",
    "custom_w",
    "smooth_step",
    "mellin_hat",
    "odd_squarefree",
    "smoothed_d_sum",
    "main_term_d_sum",
    "euler_product_direct",
    "partial_char_sum",
    "character_sums",
    "jutila_moment",
    "smoothed_jutila_moment",
    "JUTILA_BUDGET",
]

JUTILA_BUDGET = 1e10
_PAIR_BLOCK = 1 << 22  # (d, n) pairs per work block


class QuadratureError(RuntimeError):
    pass


class BudgetExceeded(RuntimeError):
    pass


class TruncationError(RuntimeError):
    pass


def smooth_step(u):
    """C-infinity step: 0 for u <= 0, 1 for u >= 1, built from exp(-1/u)."""
    u = np.asarray(u, dtype=np.float64)
    out = np.where(u >= 1.0, 1.0, 0.0)
    mid = (u > 0.0) & (u < 1.0)
    um = u[mid]
    with np.errstate(over="ignore"):
        out[mid] = expit(1.0 / (1.0 - um) - 1.0 / um)
    return out


@dataclass(frozen=True)
class SmoothingFunction:
    """A weight equal to 1 on ``plateau``, 0 outside ``support``, smooth
    C-infinity edges in between."""

    kind: str
    support: tuple
    plateau: tuple
    u_param: float | None = None
    quadrature_nodes: int = 4096

    def __post_init__(self):
        lo, hi = self.support
        pl, ph = self.plateau
        if not (0 <= lo < pl <= ph < hi):
            raise ValueError(f"need 0 <= lo < plateau <= hi, got {self.support}, {self.plateau}")

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        lo, hi = self.support
        pl, ph = self.plateau
        rise = smooth_step((x - lo) / (pl - lo))
        fall = smooth_step((hi - x) / (hi - ph))
        out = rise * fall
        return out if out.ndim else float(out)


def bump_phi() -> SmoothingFunction:
    """Support [1/4, 3/2], identically 1 on [1/2, 1]."""
    return SmoothingFunction("bump_phi", (0.25, 1.5), (0.5, 1.0))


def edge_phi_u(U: float) -> SmoothingFunction:
    """Support (0, 1), identically 1 on (1/U, 1 - 1/U)."""
    if U < 2:
        raise ValueError("U must be >= 2")
    return SmoothingFunction("edge_phi_u", (0.0, 1.0), (1.0 / U, 1.0 - 1.0 / U), u_param=float(U))


def custom_w(support: tuple, plateau: tuple) -> SmoothingFunction:
    return SmoothingFunction("custom_w", tuple(support), tuple(plateau))


def _simpson(g, a: float, b: float, n: int) -> complex:
    x = np.linspace(a, b, n + 1)
    y = g(x)
    h = (b - a) / n
    return h / 3.0 * (y[0] + y[-1] + 4.0 * np.sum(y[1:-1:2]) + 2.0 * np.sum(y[2:-1:2]))


def _refined_simpson(g, a: float, b: float, n0: int, tol: float, max_nodes: int = 1 << 22) -> complex:
    n = max(2, n0 + n0 % 2)
    prev = _simpson(g, a, b, n)
    while True:
        n *= 2
        cur = _simpson(g, a, b, n)
        if abs(cur - prev) <= tol:
            return cur
        if n >= max_nodes:
            raise QuadratureError(
                f"Simpson refinement on [{a}, {b}] did not stabilise: |diff|={abs(cur - prev):.3g}"
            )
        prev = cur


def mellin_hat(f: SmoothingFunction, s: complex, tol: float = 1e-10) -> complex:
    """int_0^inf f(x) x^(s-1) dx: exact on the plateau, Simpson on the edges."""
    s = complex(s)
    lo, hi = f.support
    pl, ph = f.plateau
    plateau = (ph**s - pl**s) / s

    def integrand(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            val = f(x) * np.power(x.astype(np.complex128), s - 1.0)
        return np.where(f(x) == 0.0, 0.0, val)

    left = _refined_simpson(integrand, lo, pl, f.quadrature_nodes, tol)
    right = _refined_simpson(integrand, ph, hi, f.quadrature_nodes, tol)
    return complex(plateau + left + right)


@lru_cache(maxsize=16)
def odd_squarefree(limit: int) -> np.ndarray:
    out = sieve_squarefree_odd(limit)
    out.setflags(write=False)
    return out


def _chi_of_fixed_n(ds: np.ndarray, n: int) -> np.ndarray:
    """chi^(8d)(n) for many d at one odd n; (8d/n) only depends on d mod n."""
    if n == 1:
        return np.ones(ds.shape, dtype=np.int8)
    if n <= 4 * len(ds):
        table = jacobi_array(8 * np.arange(n, dtype=np.int64), n)
        return table[ds % n]
    return jacobi_array(8 * ds, n)


def smoothed_d_sum(n: int, X: float, f: SmoothingFunction, k_exp: float = 0.0) -> float:
    """sum* over odd square-free d of A(d)^(-k) chi^(8d)(n) f(d/X)."""
    if n < 1:
        raise ValueError("n must be positive")
    if n % 2 == 0:
        return 0.0
    lo, hi = f.support
    ds = odd_squarefree(int(math.floor(hi * X)))
    ds = ds[ds > lo * X]
    weights = f(ds / X)
    chi = _chi_of_fixed_n(ds, n).astype(np.float64)
    terms = chi * weights
    if k_exp:
        terms = terms * np.exp(-k_exp * _log_weight_A(ds))
    return exact_sum(terms)


def _log_weight_A(ds: np.ndarray) -> np.ndarray:
    from .arith import primes_up_to

    limit = int(ds.max()) if ds.size else 1
    logA = np.zeros(limit + 1)
    for p in primes_up_to(limit)[1:]:
        p = int(p)
        logA[p::p] += math.log1p(-0.5 / p)
    return logA[ds]


@dataclass(frozen=True)
class MainTermData:
    """Pieces of the main term delta * mellin(1) * (X/2) * global * local."""

    n: int
    X: float
    k_exp: float
    archimedean: float
    euler_global: float
    euler_local_n: float
    delta_square: int
    tail_bound: float

    @property
    def value(self) -> float:
        if not self.delta_square:
            return 0.0
        return self.archimedean * 0.5 * self.X * self.euler_global * self.euler_local_n


def _A_prime_inv(p, k: float):
    return (1.0 - 0.5 / np.asarray(p, dtype=np.float64)) ** (-k)


def euler_product_direct(k_exp: float, table: PrimeTable) -> float:
    """prod_{2 < p <= P} (1 - 1/p)(1 + A(p)^(-k)/p), plainly truncated."""
    p = table.primes[1:].astype(np.float64)
    logs = np.log1p(-1.0 / p) + np.log1p(_A_prime_inv(p, k_exp) / p)
    return math.exp(math.fsum(logs))


def main_term_d_sum(
    n: int,
    X: float,
    f: SmoothingFunction,
    k_exp: float,
    table: PrimeTable,
    max_tail: float = 1e-6,
) -> MainTermData:
    """Main term of the smoothed d-sum at odd n.

    The global product is split as prod (1 - p^-2) * prod (1 + (c_p - 1)/(p + 1)),
    c_p = A(p)^(-k).  The first factor is 4/(3 zeta(2)) exactly; the second
    converges like sum 1/p^2 and is truncated at the table limit with the
    relative tail bound k/2 * (6/5)^(k+1) / P.
    """
    if n < 1 or n % 2 == 0:
        raise ValueError("main term needs odd positive n")
    if k_exp < 0:
        raise ValueError("k_exp must be >= 0")
    delta = int(is_square(n))
    arch = mellin_hat(f, 1.0).real
    p = table.primes[1:].astype(np.float64)
    c = _A_prime_inv(p, k_exp)
    odd_zeta2 = 4.0 / (3.0 * riemann_zeta(2.0).real)
    glob = odd_zeta2 * math.exp(math.fsum(np.log1p((c - 1.0) / (p + 1.0))))
    tail = 0.5 * k_exp * 1.2 ** (k_exp + 1.0) / table.limit
    if tail > max_tail:
        raise TruncationError(f"Euler product tail bound {tail:.3g} exceeds {max_tail:.3g}")
    local = 1.0
    for q in factorize(n):
        local /= 1.0 + float(_A_prime_inv(q, k_exp)) / q
    return MainTermData(n, float(X), float(k_exp), arch, glob, local, delta, tail)


def partial_char_sum(char: QuadChar, Y: float) -> int:
    """sum_{n <= Y} chi^(8d)(n), reduced modulo one full period."""
    if Y < 1:
        return 0
    r = int(math.floor(Y)) % char.modulus
    if r == 0:
        return 0
    return int(np.sum(char.values(np.arange(1, r + 1, dtype=np.int64)), dtype=np.int64))


def character_sums(ds, n: np.ndarray, weights: np.ndarray, threads: int | None = None) -> np.ndarray:
    """sum_j weights[j] (8d/n_j) for every d in ``ds`` (all n_j odd)."""
    ds = np.asarray(ds, dtype=np.int64)
    n = np.asarray(n, dtype=np.int64)
    weights = np.asarray(weights)
    if n.size == 0:
        return np.zeros(ds.shape, dtype=weights.dtype)
    block = max(1, _PAIR_BLOCK // n.size)

    def work(chunk):
        if chunk.size == 0:
            return np.zeros(0, dtype=weights.dtype)
        chi = jacobi_array(8 * chunk[:, None], n[None, :])
        return chi.astype(weights.dtype) @ weights

    return map_blocks(work, ds, block=block, threads=threads)


def _check_budget(X: float, Y: float, budget: float, force: bool) -> None:
    if X * Y > budget and not force:
        raise BudgetExceeded(f"X*Y = {X * Y:.3g} exceeds budget {budget:.3g}; pass force=True")


def jutila_moment(
    X: float,
    Y: float,
    m: float,
    threads: int | None = None,
    budget: float = JUTILA_BUDGET,
    force: bool = False,
) -> float:
    """S_m(X, Y) = sum* over odd square-free d <= X of |sum_{n <= Y} chi^(8d)(n)|^(2m)."""
    if m < 0.5:
        raise ValueError("m must be >= 1/2")
    _check_budget(X, Y, budget, force)
    ds = odd_squarefree(int(math.floor(X)))
    n = np.arange(1, int(math.floor(Y)) + 1, 2, dtype=np.int64)
    sums = character_sums(ds, n, np.ones(n.size, dtype=np.int64), threads=threads)
    return exact_sum(np.abs(sums.astype(np.float64)) ** (2 * m))


def smoothed_jutila_moment(
    X: float,
    Y: float,
    m: float,
    f: SmoothingFunction,
    threads: int | None = None,
    budget: float = JUTILA_BUDGET,
    force: bool = False,
) -> float:
    """sum* over odd square-free d <= X of |sum_n chi^(8d)(n) f(n/Y)|^(2m)."""
    _check_budget(X, Y, budget, force)
    lo, hi = f.support
    n = np.arange(1, int(math.floor(hi * Y)) + 1, 2, dtype=np.int64)
    n = n[n > lo * Y]
    w = f(n / Y)
    keep = w > 0
    n, w = n[keep], w[keep]
    ds = odd_squarefree(int(math.floor(X)))
    sums = character_sums(ds, n, w, threads=threads)
    return exact_sum(np.abs(sums) ** (2 * m))
