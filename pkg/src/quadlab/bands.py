"""Frozen tolerance bands.

The asymptotic statements being checked carry unspecified O(1) constants, so
each band below is a fixed configuration value, measured once at desk scale
and then frozen.  Every report embeds this table.
"""

from __future__ import annotations

from types import MappingProxyType

BANDS = MappingProxyType(
    {
        # sum 1/p - log log x - b1 is O(1/log x); band is this multiple of 1/log x
        "prime_recip_scale": 2.0,
        # |sum log(p)/p - log x| for 100 <= x <= 10^7 (max measured ~1.34)
        "prime_logp": 3.0,
        # |sum cos(alpha log p)/p - log|zeta(1 + 1/log x + i alpha)|| (max measured ~0.26)
        "prime_cos": 3.0,
        # |sum cos(alpha log p)/p - log(1/alpha)| in the 1/log x <= alpha <= 10 range
        "prime_cos_middle": 4.0,
        # explicit log-L upper bound may undershoot log|L| by at most this
        "log_l_slack": 5.0,
        # 1st percentile of the log|A L| margin over a random sample
        "prop25_floor": -5.0,
        "prop25_percentile": 1.0,
        # smoothed d-sum vs main term at a square n
        "lemma22_rel": 0.05,
        # |smoothed d-sum| <= X^this at a non-square n
        "lemma22_nonsquare_exponent": 0.75,
        # empirical / envelope must fit inside one window of this width
        "envelope_window": 10.0,
        # Jutila ladder ratio may rise by at most this fraction per step
        "jutila_flat": 0.20,
        # qualitative ceiling on the exceptional-class fraction
        "harper_s0_fraction": 0.5,
        "funceq_residual": 1e-8,
        "afe_vs_hurwitz": 1e-6,
        "hurwitz_vs_series": 1e-10,
        "integral_richardson": 0.01,
        "mellin_refinement": 1e-10,
    }
)


def band(name: str) -> float:
    return BANDS[name]
