"""End-to-end acceptance checks, one test per criterion.

Each test prints a ``CRITERION n: PASS|FAIL ...`` line; the lines are also
collected into the pytest terminal summary. Run directly with
``python3 tests/test_acceptance.py`` to get just the lines.
"""

import math
import time

import pytest

from oracles import jacobi_table_oracle
from quadlab import experiments as ex
from quadlab.arith import QuadChar, jacobi_symbol, prime_table
from quadlab.bands import BANDS
from quadlab.charsums import odd_squarefree
from quadlab.harper import build_schedule, classify_d
from quadlab.lfunc import ShiftConfig
from quadlab.moments import exponent_branches, exponent_E
from quadlab.reports import render

RESULTS: dict[int, str] = {}


def _record(n: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} {detail}"
    RESULTS[n] = line
    print(line)


class _Clock:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


# single-thread reports shared with the determinism check
_REPORTS: dict[str, str] = {}


def _lemma22_report(threads):
    return ex.verify_lemma22([1, 9, 3], 1e6)


def _envelope_report(threads):
    return ex.verify_envelope(1e4, (1.0, 1.0), (0.0, 1.0, 2.0, 5.0), threads=threads, cache={})


def _jutila_report(threads):
    return ex.run_jutila([2**12, 2**14, 2**16], None, 1.0, threads=threads)


def test_criterion_1_jacobi_exhaustive():
    with _Clock() as clk:
        mismatches = 0
        pairs = 0
        for n in range(1, 3001, 2):
            ref = jacobi_table_oracle(n)
            for a in range(n):
                pairs += 1
                if jacobi_symbol(a, n) != ref[a]:
                    mismatches += 1
    ok = mismatches == 0 and clk.elapsed < 10
    _record(1, ok, f"pairs={pairs} mismatches={mismatches} time={clk.elapsed:.2f}s (limit 10s)")
    assert ok


def test_criterion_2_main_term():
    with _Clock() as clk:
        rep = _lemma22_report(1)
    _REPORTS["lemma22"] = render(rep)
    by_n = {r["n"]: r for r in rep.rows}
    dev1 = abs(by_n[1]["ratio"] - 1)
    dev9 = abs(by_n[9]["ratio"] - 1)
    direct3 = abs(by_n[3]["direct"])
    ok = dev1 <= 0.05 and dev9 <= 0.05 and direct3 <= 1e6**0.75 and clk.elapsed < 120
    _record(
        2,
        ok,
        f"|ratio-1| n=1: {dev1:.2e}, n=9: {dev9:.2e} (band 0.05); |direct| n=3: {direct3:.3g} "
        f"(bound {1e6**0.75:.3g}); time={clk.elapsed:.1f}s",
    )
    assert ok


def test_criterion_3_prime_cos_band():
    with _Clock() as clk:
        rep = ex.verify_lemma21((1e3, 1e5, 1e7), (0.0, 0.5, 1.0, 2.0, 5.0, 10.0))
    worst = max(abs(r["cos_dev"]) for r in rep.rows)
    ok = worst <= 3 and len(rep.rows) == 18 and clk.elapsed < 60
    _record(3, ok, f"max |cos_sum - log|zeta|| = {worst:.3f} over 18 grid points (band 3); time={clk.elapsed:.1f}s")
    assert ok


def test_criterion_4_functional_equation():
    with _Clock() as clk:
        rep = ex.verify_funceq((1, 3, 5, 7, 11, 13, 15), (0.0, 1.0, 2.0, 5.0, 10.0))
    res = rep.meta["max_residual"]
    series = rep.meta["series_check_max_abs"]
    ok = res <= 1e-8 and series <= 1e-10 and clk.elapsed < 60
    _record(
        4, ok, f"max residual={res:.2e} (1e-8); Hurwitz vs series at s=2: {series:.2e} (1e-10); time={clk.elapsed:.1f}s"
    )
    assert ok


def test_criterion_5_envelope_window():
    with _Clock() as clk:
        rep = _envelope_report(1)
    _REPORTS["envelope"] = render(rep)
    m = rep.meta
    ok = m["spread"] <= 10 and clk.elapsed < 600
    _record(
        5,
        ok,
        f"empirical/cor12 in [{m['ratio_min']:.3g}, {m['ratio_max']:.3g}], spread={m['spread']:.3g} "
        f"(window 10) over 16 shift pairs; time={clk.elapsed:.1f}s",
    )
    assert ok


def test_criterion_6_jutila_ladder():
    with _Clock() as clk:
        rep = _jutila_report(1)
    _REPORTS["jutila"] = render(rep)
    r = [row["ratio_log"] for row in rep.rows]
    steps_ok = all(b <= a * (1 + BANDS["jutila_flat"]) for a, b in zip(r, r[1:]))
    ok = steps_ok and clk.elapsed < 300
    _record(6, ok, "S_1/(X Y log^3 X) = " + ", ".join(f"{v:.3e}" for v in r) + f" (flat tol 20%); time={clk.elapsed:.1f}s")
    assert ok


def test_criterion_7_harper_partition():
    with _Clock() as clk:
        rep = ex.verify_harper_census(1e4, 1, 0.0, (1.0,), (0.0,), strict=False)
        cfg = ShiftConfig((1.0,), (0.0,))
        sched = build_schedule(1e4, 1, 0.0, strict=False)
        table = prime_table(max(2, int(math.ceil(sched.ranges[-1][1]))))
        fam = odd_squarefree(10**4)
        classes = [classify_d(QuadChar(int(d)), cfg, sched, table) for d in fam]
    counts = [sum(1 for c in classes if c == j) for j in range(sched.J + 1)]
    exact = sum(counts) == fam.size and all(0 <= c <= sched.J for c in classes)
    agrees = counts == [row["count"] for row in rep.rows]
    frac0 = rep.meta["s0_fraction"]
    ok = exact and agrees and frac0 < 0.5 and clk.elapsed < 120
    _record(
        7,
        ok,
        f"partition exact={exact and agrees} ({fam.size} d, J={sched.J}, degenerate={sched.degenerate}); "
        f"S(0) fraction={frac0:.4f} (ceiling 0.5); time={clk.elapsed:.1f}s",
    )
    assert ok


def test_criterion_8_exponent_table():
    with _Clock() as clk:
        e1 = exponent_E(2, 2, 0.01)
        e2 = exponent_E(1.5, 2, 0.01)
        active = {}
        for m in (1.7, 2.0, 3.0):
            b = exponent_branches(m, 2, 0.01)
            active[m] = (m * m - m - 1 > 0) and exponent_E(m, 2, 0.01) == b[0]
    ok = e1 == pytest.approx(7) and e2 == pytest.approx(4.26) and all(active.values()) and clk.elapsed < 1
    _record(8, ok, f"E(2,2,.01)={e1:g}, E(1.5,2,.01)={e2:g}, branch 1 active for m in {sorted(active)}: "
            f"{all(active.values())}; time={clk.elapsed * 1e3:.2f}ms")
    assert ok


def test_criterion_9_thread_determinism():
    makers = {"lemma22": _lemma22_report, "envelope": _envelope_report, "jutila": _jutila_report}
    same = {}
    for name, make in makers.items():
        one = _REPORTS.get(name) or render(make(1))
        eight = render(make(8))
        same[name] = one.encode() == eight.encode()
    ok = all(same.values())
    _record(9, ok, "byte-identical 1 vs 8 threads: " + ", ".join(f"{k}={v}" for k, v in same.items()))
    assert ok


if __name__ == "__main__":
    import sys

    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    tests.sort(key=lambda f: int(f.__name__.split("_")[2]))
    failed = 0
    for t in tests:
        try:
            t()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
