"""Shifted moments of L(1/2 + it, chi^(8d)) over the family, their envelopes,
the g function and the exponent E(m, k, eps)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._parallel import exact_sum, map_blocks
from .charsums import odd_squarefree
from .lfunc import LEvaluationError, ShiftConfig, l_values_critical
from .zeta import DEFAULT_ZETA, ZetaEvaluator

__all__ = [
    "MomentReport",
    "QuadratureMismatch",
    "g_function",
    "exponent_E",
    "exponent_branches",
    "envelope_cor12",
    "envelope_thm11",
    "envelope_lemma26",
    "abs_l_critical",
    "shifted_moment_empirical",
    "integral_abs_moment",
]

_L_BLOCK = 512


class QuadratureMismatch(RuntimeError):
    pass


def g_function(x: float, X: float) -> float:
    """Piecewise weight: log X near 0 and beyond e^X, 1/x up to 10, log log x after.

    Where neighbouring cases meet, the left one wins.
    """
    if x < 0:
        raise ValueError(f"g needs x >= 0, got {x}")
    if X <= math.e:
        raise ValueError("g needs X > e")
    logX = math.log(X)
    if x < 1.0 / logX:
        return logX
    if x <= 10.0:
        return 1.0 / x
    # x >= e^X compared in log space so huge X does not overflow
    if math.log(x) >= X:
        return logX
    return math.log(math.log(x))


def exponent_branches(m: float, k: int, eps: float) -> tuple[float, float, float]:
    return (
        2 * m * m - m + 1,
        (2 * m - k) ** 2 / 4 + 2 * m + 1 + eps,
        2 * m * m - 2 * m * k + 3 * k * k / 4 + m - 3 * k / 4 + eps,
    )


def exponent_E(m: float, k: int, eps: float) -> float:
    """max of the three branch values; requires 2m >= k + 1."""
    if k < 1 or int(k) != k:
        raise ValueError("k must be a positive integer")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if 2 * m < k + 1:
        raise ValueError(f"need 2m >= k+1, got m={m}, k={k}")
    return max(exponent_branches(m, k, eps))


def _pair_products(cfg: ShiftConfig, weight) -> float:
    """sum of log-weights over pairs j<l (t_j -/+ t_l) and singles (2 t_j)."""
    a, t = cfg.a_vec, cfg.t_vec
    logs = []
    for j in range(cfg.k):
        for l in range(j + 1, cfg.k):
            e = a[j] * a[l] / 2
            logs.append(e * math.log(weight(abs(t[j] - t[l]))))
            logs.append(e * math.log(weight(abs(t[j] + t[l]))))
        logs.append((a[j] ** 2 / 4 + a[j] / 2) * math.log(weight(abs(2 * t[j]))))
    return math.fsum(logs)


def _base_log(cfg: ShiftConfig, X: float) -> float:
    return math.log(X) + math.fsum(v * v for v in cfg.a_vec) / 4 * math.log(math.log(X))


def envelope_cor12(cfg: ShiftConfig, X: float) -> float:
    """X (log X)^(sum a^2/4) times the g-products."""
    cfg.check_shifts(X)
    return math.exp(_base_log(cfg, X) + _pair_products(cfg, lambda x: g_function(x, X)))


def envelope_thm11(cfg: ShiftConfig, X: float, zeta: ZetaEvaluator = DEFAULT_ZETA) -> float:
    """X (log X)^(sum a^2/4) times |zeta(1 + 1/log X + i u)| powers."""
    cfg.check_shifts(X)
    off = 1.0 / math.log(X)

    def weight(u):
        return abs(zeta.riemann(complex(1.0 + off, u)))

    return math.exp(_base_log(cfg, X) + _pair_products(cfg, weight))


def envelope_lemma26(cfg: ShiftConfig, X: float) -> float:
    """X (log X)^(a(a+1)/2) with a = sum a_j."""
    a = cfg.a_total
    return X * math.log(X) ** (a * (a + 1) / 2)


@dataclass(frozen=True)
class MomentReport:
    X: float
    cfg: ShiftConfig
    empirical: float
    envelope_thm11: float
    envelope_cor12: float
    envelope_lemma26: float
    ratio: float
    family_size: int
    envelope_used: str = "cor12"
    meta: dict = field(default_factory=dict)

    def as_row(self) -> dict:
        return {
            "X": self.X,
            "a": " ".join(repr(v) for v in self.cfg.a_vec),
            "t": " ".join(repr(v) for v in self.cfg.t_vec),
            "sigma": self.cfg.sigma,
            "family_size": self.family_size,
            "empirical": self.empirical,
            "envelope_thm11": self.envelope_thm11,
            "envelope_cor12": self.envelope_cor12,
            "envelope_lemma26": self.envelope_lemma26,
            "ratio": self.ratio,
        }


def abs_l_critical(ds, t: float, threads: int | None = None) -> np.ndarray:
    """|L(1/2 + it, chi^(8d))| for each d.  |L| is even in t for real characters."""
    ds = np.asarray(ds, dtype=np.int64)
    t = abs(float(t))

    def work(chunk):
        if chunk.size == 0:
            return np.zeros(0)
        return np.abs(l_values_critical(chunk, t))

    vals = map_blocks(work, ds, block=_L_BLOCK, threads=threads)
    if not np.all(np.isfinite(vals)):
        bad = ds[~np.isfinite(vals)]
        raise LEvaluationError(f"non-finite L(1/2+{t}i) for d={int(bad[0])}")
    return vals


def shifted_moment_empirical(
    X: float,
    cfg: ShiftConfig,
    threads: int | None = None,
    zeta: ZetaEvaluator = DEFAULT_ZETA,
    cache: dict | None = None,
) -> MomentReport:
    """sum over odd square-free d <= X of prod_j |L(1/2 + i t_j)|^(a_j).

    ``cache`` (optional) maps (floor X, |t|) to |L| arrays and may be shared
    between calls over the same family.
    """
    if cfg.sigma != 0.5:
        raise ValueError("empirical moments are taken on the critical line (sigma = 1/2)")
    ds = odd_squarefree(int(math.floor(X)))
    if cache is None:
        cache = {}
    logs = np.zeros(ds.size)
    for a, t in zip(cfg.a_vec, cfg.t_vec):
        key = (int(math.floor(X)), abs(t))
        if key not in cache:
            cache[key] = abs_l_critical(ds, key[1], threads=threads)
        with np.errstate(divide="ignore"):
            logs = logs + a * np.log(cache[key])
    empirical = exact_sum(np.exp(logs))
    Xe = max(float(X), math.e + 1e-9)  # envelopes need log log X defined
    thm = envelope_thm11(cfg, Xe, zeta)
    cor = envelope_cor12(cfg, Xe)
    lem = envelope_lemma26(cfg, Xe)
    return MomentReport(float(X), cfg, empirical, thm, cor, lem, empirical / cor, int(ds.size))


def _simpson_uniform(y: np.ndarray, h: float) -> np.ndarray:
    """Composite Simpson along the last axis (odd number of samples)."""
    return h / 3.0 * (
        y[..., 0] + y[..., -1] + 4.0 * y[..., 1:-1:2].sum(axis=-1) + 2.0 * y[..., 2:-1:2].sum(axis=-1)
    )


def integral_abs_moment(
    X: float,
    E_lim: float,
    m: float,
    quad_step: float = 0.05,
    rel_tol: float = 0.01,
    threads: int | None = None,
) -> float:
    """sum over odd square-free d <= X of (int_0^E |L(1/2+it)| dt)^(2m).

    Fixed-step composite Simpson; the same rule at double the step must agree
    to ``rel_tol`` for every d.
    """
    if E_lim < 0:
        raise ValueError("E_lim must be nonnegative")
    if quad_step <= 0:
        raise ValueError("quad_step must be positive")
    ds = odd_squarefree(int(math.floor(X)))
    if E_lim == 0 or ds.size == 0:
        return 0.0
    # interval count divisible by 4 so the coarse rule reuses every other node
    n = 4 * max(1, math.ceil(E_lim / (4 * quad_step)))
    h = E_lim / n
    ts = np.linspace(0.0, E_lim, n + 1)
    y = np.stack([abs_l_critical(ds, t, threads=threads) for t in ts], axis=1)
    fine = _simpson_uniform(y, h)
    coarse = _simpson_uniform(y[:, ::2], 2 * h)
    diff = np.abs(fine - coarse) / np.maximum(np.abs(fine), 1e-300)
    worst = int(np.argmax(diff))
    if diff[worst] > rel_tol:
        raise QuadratureMismatch(
            f"step {h:.4g} too coarse for d={int(ds[worst])}: relative disagreement {diff[worst]:.3g}"
        )
    return exact_sum(fine ** (2 * m))
