"""Prime-range decomposition of log|L| into short Dirichlet polynomials, and the
classification of d by where those polynomials first become large."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._parallel import map_blocks
from .arith import PrimeTable, QuadChar, jacobi_array
from .charsums import odd_squarefree
from .lfunc import ShiftConfig, h_of_n

__all__ = [
    "HarperSchedule",
    "DegenerateScheduleError",
    "build_schedule",
    "truncated_exp",
    "h_prime",
    "h1_prime",
    "s_weight",
    "m_lj",
    "m_matrix",
    "classify_d",
    "classify_family",
    "census",
    "companion_h1_sum",
    "THRESHOLD_SCALE",
]

THRESHOLD_SCALE = 1e3


class DegenerateScheduleError(ValueError):
    """The set {j >= 1 : alpha_j <= 10^-M} is empty at this X."""

    def __init__(self, X: float, M: int, alpha1: float):
        self.X, self.M, self.alpha1 = X, M, alpha1
        super().__init__(
            f"degenerate schedule at X={X:g}, M={M}: alpha_1={alpha1:.4g} > 10^-{M}; "
            "no j >= 1 qualifies (pass strict=False to run with J=1 and a degenerate flag)"
        )


@dataclass(frozen=True)
class HarperSchedule:
    X: float
    const_M: int
    const_B: float
    alphas: tuple  # alpha_0 = 0, alpha_1, ..., alpha_J
    J: int
    ells: tuple  # ell_1, ..., ell_J
    ranges: tuple  # (lo, hi] = (X^alpha_{j-1}, X^alpha_j], j = 1..J
    degenerate: bool = False
    notes: dict = field(default_factory=dict)

    def alpha(self, j: int) -> float:
        return self.alphas[j]

    def ell(self, j: int) -> int:
        return self.ells[j - 1]

    def x_of(self, j: int) -> float:
        return self.X ** self.alphas[j]

    def header(self) -> dict:
        return {
            "X": self.X,
            "M": self.const_M,
            "B": self.const_B,
            "J": self.J,
            "degenerate": self.degenerate,
            "alphas": list(self.alphas),
            "ells": list(self.ells),
        }


def build_schedule(X: float, const_M: int = 1, const_B: float = 0.0, strict: bool = True) -> HarperSchedule:
    """alpha_j = 20^(j-1)/(log log X)^2, J = 1 + max{j : alpha_j <= 10^-M},
    ell_j = 2 ceil(e^B alpha_j^(-3/4)).

    When no j >= 1 qualifies, ``strict`` raises; otherwise alpha_0 = 0 is
    taken as the maximiser, giving J = 1 and ``degenerate=True``.
    """
    if X <= math.e:
        raise ValueError("X must exceed e")
    llX = math.log(math.log(X))
    if llX <= 0:
        raise ValueError("log log X must be positive")
    if const_M < 1 or int(const_M) != const_M:
        raise ValueError("M must be a positive integer")
    if const_B < 0:
        raise ValueError("B must be nonnegative")
    cap = 10.0 ** (-const_M)

    def alpha(j):
        return 20.0 ** (j - 1) / llX**2

    jmax = 0
    while alpha(jmax + 1) <= cap:
        jmax += 1
    degenerate = jmax == 0
    if degenerate and strict:
        raise DegenerateScheduleError(X, const_M, alpha(1))
    J = 1 + jmax
    alphas = (0.0,) + tuple(alpha(j) for j in range(1, J + 1))
    ells = tuple(2 * math.ceil(math.exp(const_B) * a ** -0.75) for a in alphas[1:])
    ranges = tuple((X ** alphas[j - 1], X ** alphas[j]) for j in range(1, J + 1))
    sched = HarperSchedule(float(X), int(const_M), float(const_B), alphas, J, ells, ranges, degenerate)
    _check_schedule(sched)
    return sched


def _check_schedule(s: HarperSchedule) -> None:
    a = s.alphas
    assert all(a[j] < a[j + 1] for j in range(1, len(a) - 1)), "alphas not increasing"
    assert all(e % 2 == 0 and e >= 2 for e in s.ells), "ell_j must be even and >= 2"
    assert all(s.ells[j] > s.ells[j + 1] for j in range(len(s.ells) - 1)), "ell_j not decreasing"
    for j in range(len(s.ranges) - 1):
        assert s.ranges[j][1] == s.ranges[j + 1][0], "prime ranges do not tile"


def truncated_exp(ell: int, x: float) -> float:
    """sum_{j=0}^{ell} x^j / j!, Horner form."""
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    acc = 1.0
    for j in range(ell, 0, -1):
        acc = 1.0 + acc * x / j
    return acc


def _offset(sigma: float, x: float) -> float:
    return max(sigma - 0.5, 1.0 / math.log(x))


def h_prime(p, sigma: float, x: float, cfg: ShiftConfig):
    """h(p, sigma, x) = 2 h(p) / (a p^max(sigma - 1/2, 1/log x))."""
    p = np.asarray(p, dtype=np.float64)
    return 2.0 * h_of_n(p, cfg) / (cfg.a_total * p ** _offset(sigma, x))


def h1_prime(p, sigma: float, x: float, cfg: ShiftConfig):
    """h_1(p, sigma, x) = 4 h(p^2) / (a^2 p^(2 max(sigma - 1/2, 1/log x)))."""
    p = np.asarray(p, dtype=np.float64)
    return 4.0 * h_of_n(p * p, cfg) / (cfg.a_total**2 * p ** (2 * _offset(sigma, x)))


def s_weight(p, x: float):
    """s(p, x) = log(x/p) / log x."""
    p = np.asarray(p, dtype=np.float64)
    return np.log(x / p) / math.log(x)


def _check_indices(l: int, j: int, sched: HarperSchedule) -> None:
    if not (1 <= l <= j <= sched.J):
        raise IndexError(f"need 1 <= l <= j <= J={sched.J}, got l={l}, j={j}")


def _coefficients(l: int, j: int, cfg: ShiftConfig, sched: HarperSchedule, table: PrimeTable):
    """Primes of P_l and the weights h(p,sigma,x) s(p,x)/sqrt p at x = X^alpha_j."""
    _check_indices(l, j, sched)
    lo, hi = sched.ranges[l - 1]
    p = table.primes_in(lo, hi)
    x = sched.x_of(j)
    pf = p.astype(np.float64)
    w = h_prime(pf, cfg.sigma, x, cfg) * s_weight(pf, x) / np.sqrt(pf)
    return p, w


def m_lj(char: QuadChar, l: int, j: int, cfg: ShiftConfig, sched: HarperSchedule, table: PrimeTable) -> float:
    """M_{l,j}(d) = sum_{p in P_l} h(p, sigma, X^alpha_j) chi(p) s(p, X^alpha_j) / sqrt p."""
    p, w = _coefficients(l, j, cfg, sched, table)
    if p.size == 0:
        return 0.0
    chi = char.values(p).astype(np.float64)
    return math.fsum(chi * w)


def m_matrix(ds, cfg: ShiftConfig, sched: HarperSchedule, table: PrimeTable, threads: int | None = None) -> dict:
    """{(l, j): array of M_{l,j}(d) over ds} for all 1 <= l <= j <= J."""
    ds = np.asarray(ds, dtype=np.int64)
    out = {}
    for l in range(1, sched.J + 1):
        for j in range(l, sched.J + 1):
            p, w = _coefficients(l, j, cfg, sched, table)
            if p.size == 0:
                out[(l, j)] = np.zeros(ds.size)
                continue
            odd = p % 2 == 1

            def work(chunk, p=p, w=w, odd=odd):
                vals = np.zeros((chunk.size, p.size))
                # chi^(8d)(2) = 0; odd primes via the Jacobi symbol
                vals[:, odd] = jacobi_array(8 * chunk[:, None], p[odd][None, :])
                return vals @ w

            out[(l, j)] = map_blocks(work, ds, block=max(1, (1 << 20) // p.size), threads=threads)
    return out


def _classify_from(mvals: dict, a: float, sched: HarperSchedule) -> np.ndarray:
    """Vectorised class assignment from precomputed M_{l,j} arrays."""
    J = sched.J
    size = next(iter(mvals.values())).size
    cls = np.full(size, -1, dtype=np.int64)
    for m in range(1, J + 1):
        thr = sched.ell(m) / THRESHOLD_SCALE
        bad = np.zeros(size, dtype=bool)
        for l in range(m, J + 1):
            bad |= np.abs(a * mvals[(m, l)]) > thr
        # first violation at level m puts d in class m - 1
        newly = bad & (cls < 0)
        cls[newly] = m - 1
    cls[cls < 0] = J
    return cls


def classify_d(char: QuadChar, cfg: ShiftConfig, sched: HarperSchedule, table: PrimeTable) -> int:
    """The unique j in [0, J] with d in S(j)."""
    mvals = {
        (l, j): np.array([m_lj(char, l, j, cfg, sched, table)])
        for l in range(1, sched.J + 1)
        for j in range(l, sched.J + 1)
    }
    return int(_classify_from(mvals, cfg.a_total, sched)[0])


def classify_family(
    X: float, cfg: ShiftConfig, sched: HarperSchedule, table: PrimeTable, threads: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """(ds, classes) for every odd square-free d <= X."""
    ds = odd_squarefree(int(math.floor(X)))
    table.check_range(sched.ranges[-1][1], "X^alpha_J")
    mvals = m_matrix(ds, cfg, sched, table, threads=threads)
    return ds, _classify_from(mvals, cfg.a_total, sched)


def census(
    X: float, cfg: ShiftConfig, sched: HarperSchedule, table: PrimeTable, threads: int | None = None
) -> list[dict]:
    """Per-class counts and fractions; one row per class 0..J."""
    ds, cls = classify_family(X, cfg, sched, table, threads=threads)
    counts = np.bincount(cls, minlength=sched.J + 1)
    total = int(ds.size)
    shifts = " ".join(f"{a!r}@{t!r}" for a, t in zip(cfg.a_vec, cfg.t_vec))
    return [
        {
            "class_j": j,
            "count": int(counts[j]),
            "fraction": float(counts[j] / total) if total else 0.0,
            "X": X,
            "M": sched.const_M,
            "B": sched.const_B,
            "sigma": cfg.sigma,
            "shifts": shifts,
        }
        for j in range(sched.J + 1)
    ]


def companion_h1_sum(j: int, cfg: ShiftConfig, sched: HarperSchedule, table: PrimeTable) -> float:
    """(a^2/4) sum_{p <= X^(alpha_j/2)} h_1(p, sigma, X^alpha_j) / p."""
    if not 1 <= j <= sched.J:
        raise IndexError(f"need 1 <= j <= J={sched.J}")
    x = sched.x_of(j)
    p = table.primes_le(math.sqrt(x)).astype(np.float64)
    if p.size == 0:
        return 0.0
    return cfg.a_total**2 / 4 * math.fsum(h1_prime(p, cfg.sigma, x, cfg) / p)
