"""Numerical laboratory for the quadratic characters chi^(8d) = (8d/.) and
their L-functions: character sums, critical-line L-values, shifted moments
and the prime-range decomposition of log|L|."""

__version__ = "0.1.0"

from .arith import PrimeTable, QuadChar, jacobi_symbol, prime_table, sieve_squarefree_odd
from .lfunc import ShiftConfig, l_value, l_values_critical
from .zeta import ZetaEvaluator, riemann_zeta, hurwitz_zeta

__all__ = [
    "PrimeTable",
    "QuadChar",
    "ShiftConfig",
    "ZetaEvaluator",
    "jacobi_symbol",
    "prime_table",
    "sieve_squarefree_odd",
    "l_value",
    "l_values_critical",
    "riemann_zeta",
    "hurwitz_zeta",
    "__version__",
]
