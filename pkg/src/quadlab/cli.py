"""Command-line workbench.

Exit codes: 0 ok, 2 invalid config, 3 budget refusal, 4 numerical failure,
5 empty report input.
"""

from __future__ import annotations

import glob
import sys
from pathlib import Path

import click

from . import experiments as ex
from .charsums import BudgetExceeded, QuadratureError, TruncationError
from .harper import DegenerateScheduleError
from .lfunc import LEvaluationError
from .moments import QuadratureMismatch
from .reports import Report, ReportError, emit_plot_script, read_csv_report, render, write_report
from .zeta import PoleError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_NUMERICAL = 4
EXIT_EMPTY = 5

_NUMERICAL = (
    LEvaluationError,
    QuadratureError,
    QuadratureMismatch,
    TruncationError,
    PoleError,
    DegenerateScheduleError,
    FloatingPointError,
)


def _float_list(text: str | None) -> list[float] | None:
    if text is None:
        return None
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise click.BadParameter(f"expected a comma-separated list of numbers, got {text!r}")


def _int_list(text: str | None) -> list[int] | None:
    vals = _float_list(text)
    if vals is None:
        return None
    if any(v != int(v) for v in vals):
        raise click.BadParameter(f"expected integers, got {text!r}")
    return [int(v) for v in vals]


def load_config_file(path: str) -> dict:
    """key=value lines; '#' starts a comment; keys use option names (dashes or underscores)."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep or not key.strip():
            raise click.UsageError(f"{path}:{lineno}: expected key=value")
        out[key.strip().lstrip("-").replace("-", "_")] = val.strip()
    return out


def _all_param_names(cmd: click.Command) -> set[str]:
    names = {p.name for p in cmd.params}
    if isinstance(cmd, click.Group):
        for sub in cmd.commands.values():
            names |= _all_param_names(sub)
    return names


def _default_map(cmd: click.Command, values: dict) -> dict:
    mapping = {}
    if isinstance(cmd, click.Group):
        for name, sub in cmd.commands.items():
            mapping[name] = _default_map(sub, values)
    else:
        names = {p.name for p in cmd.params}
        mapping = {k: v for k, v in values.items() if k in names}
    return mapping


def _emit(report: Report, out: str | None, fmt: str, plot: bool = False) -> None:
    if out:
        path = write_report(report, out, fmt)
        if plot and fmt == "csv":
            emit_plot_script(path)
    else:
        click.echo(render(report, fmt), nl=False)


def _run(ctx: click.Context, producer, out, fmt, plot=False):
    """Call ``producer`` and map failures to exit codes."""
    try:
        report = producer()
    except BudgetExceeded as exc:
        click.echo(f"budget refused: {exc}", err=True)
        ctx.exit(EXIT_BUDGET)
    except _NUMERICAL as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        ctx.exit(EXIT_NUMERICAL)
    except (ValueError, TypeError, IndexError) as exc:
        click.echo(f"invalid config: {exc}", err=True)
        ctx.exit(EXIT_CONFIG)
    _emit(report, out, fmt, plot)


def common(func):
    """Options shared by every report-producing command."""
    func = click.option("--plot", is_flag=True, help="Also write a plotting script next to --out.")(func)
    func = click.option("--seed", type=int, default=0, show_default=True, help="Sampling seed.")(func)
    func = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)(func)
    func = click.option("--out", type=click.Path(dir_okay=False), default=None, help="Report path (stdout if omitted).")(func)
    func = click.option(
        "--threads", type=click.IntRange(min=1), default=None, envvar="QDL_THREADS", help="Worker threads [env QDL_THREADS]."
    )(func)
    return func


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="key=value file supplying option defaults.")
@click.version_option(package_name="artifact", prog_name="quadlab")
@click.pass_context
def main(ctx: click.Context, config_path: str | None):
    """Experiments on quadratic characters chi^(8d) and their L-functions."""
    if config_path:
        values = load_config_file(config_path)
        unknown = sorted(set(values) - _all_param_names(ctx.command))
        if unknown:
            raise click.UsageError(f"unknown config keys: {', '.join(unknown)}")
        ctx.default_map = _default_map(ctx.command, values)


@main.command()
@click.option("--X", "X", type=float, required=True, help="Upper limit for d.")
@common
@click.pass_context
def sieve(ctx, X, threads, out, fmt, seed, plot):
    """Count odd square-free d <= X."""
    _run(ctx, lambda: ex.run_sieve(X), out, fmt, plot)


@main.command("zeta-check")
@click.option("--sigmas", default="0.3,0.5,0.7", show_default=True)
@click.option("--ts", default="1,5,20", show_default=True)
@common
@click.pass_context
def zeta_check(ctx, sigmas, ts, threads, out, fmt, seed, plot):
    """zeta(s) on a grid with reflection-formula residuals."""
    _run(ctx, lambda: ex.run_zeta_check(_float_list(sigmas), _float_list(ts)), out, fmt, plot)


@main.command()
@click.option("--d", "ds", required=True, help="Comma-separated odd square-free d.")
@click.option("--shifts", default="0", show_default=True)
@click.option("--sigma", type=float, default=0.5, show_default=True)
@common
@click.pass_context
def lvalue(ctx, ds, shifts, sigma, threads, out, fmt, seed, plot):
    """L(sigma + it, chi^(8d)) for each d and shift."""
    _run(ctx, lambda: ex.run_lvalue(_int_list(ds), _float_list(shifts), sigma), out, fmt, plot)


@main.command()
@click.option("--X", "X", required=True, help="One X or a comma-separated ladder.")
@click.option("--Y", "Y", default="sqrt", show_default=True, help="Length of the n-sum, or 'sqrt' for floor(sqrt X).")
@click.option("--m", type=float, default=1.0, show_default=True)
@click.option("--smooth", is_flag=True, help="Weight n by the bump on [1/4, 3/2].")
@click.option("--force", is_flag=True, help="Run even above the X*Y budget.")
@common
@click.pass_context
def jutila(ctx, X, Y, m, smooth, force, threads, out, fmt, seed, plot):
    """S_m(X, Y): 2m-th moment of character sums over the family."""
    Xs = _float_list(X)
    Yv = None if str(Y).lower() == "sqrt" else float(Y)
    _run(ctx, lambda: ex.run_jutila(Xs, Yv, m, smooth=smooth, force=force, threads=threads), out, fmt, plot)


@main.command()
@click.option("--X", "X", type=float, required=True)
@click.option("--shifts", required=True, help="Comma-separated t_j.")
@click.option("--exponents", required=True, help="Comma-separated a_j.")
@common
@click.pass_context
def moment(ctx, X, shifts, exponents, threads, out, fmt, seed, plot):
    """Shifted moment of |L(1/2 + it_j)|^(a_j) with its envelopes."""
    t, a = _float_list(shifts), _float_list(exponents)
    _run(ctx, lambda: ex.run_moment(X, a, t, threads=threads), out, fmt, plot)


@main.group()
def verify():
    """Checks of individual estimates against their bands."""


@verify.command()
@click.option("--xs", default="1e3,1e5,1e7", show_default=True)
@click.option("--alphas", default="0,0.5,1,2,5,10", show_default=True)
@common
@click.pass_context
def lemma21(ctx, xs, alphas, threads, out, fmt, seed, plot):
    """Prime sums 1/p, log(p)/p and cos(alpha log p)/p."""
    _run(ctx, lambda: ex.verify_lemma21(_float_list(xs), _float_list(alphas)), out, fmt, plot)


@verify.command()
@click.option("--n", "ns", default="1,9,3", show_default=True)
@click.option("--X", "X", type=float, default=1e5, show_default=True)
@click.option("--k", "k_exp", type=float, default=0.0, show_default=True, help="Exponent of A(d)^(-k).")
@click.option("--table-limit", type=int, default=ex.DEFAULT_TABLE_LIMIT, show_default=True)
@common
@click.pass_context
def lemma22(ctx, ns, X, k_exp, table_limit, threads, out, fmt, seed, plot):
    """Smoothed d-sums against their Euler-product main terms."""
    _run(ctx, lambda: ex.verify_lemma22(_int_list(ns), X, k_exp, table_limit), out, fmt, plot)


@verify.command()
@click.option("--X", "X", type=float, default=1e5, show_default=True)
@click.option("--x", "x", type=float, default=1e3, show_default=True)
@click.option("--samples", type=int, default=200, show_default=True)
@click.option("--exponents", default="2", show_default=True)
@click.option("--shifts", default="0", show_default=True)
@click.option("--sigma", type=float, default=0.5, show_default=True)
@common
@click.pass_context
def prop25(ctx, X, x, samples, exponents, shifts, sigma, threads, out, fmt, seed, plot):
    """Margin of the log|A(d) L| upper bound over a seeded sample of d."""
    a, t = _float_list(exponents), _float_list(shifts)
    _run(ctx, lambda: ex.verify_prop25(X, x, samples, seed, a, t, sigma), out, fmt, plot)


@verify.command()
@click.option("--X", "X", type=float, default=1e4, show_default=True)
@click.option("--exponents", default="1,1", show_default=True)
@click.option("--grid", default="0,1,2,5", show_default=True, help="Shift values; all k-tuples are used.")
@common
@click.pass_context
def envelope(ctx, X, exponents, grid, threads, out, fmt, seed, plot):
    """Empirical moment over the envelope across a shift grid."""
    a, g = _float_list(exponents), _float_list(grid)
    _run(ctx, lambda: ex.verify_envelope(X, a, g, threads=threads), out, fmt, plot)


@verify.command("harper-census")
@click.option("--X", "X", type=float, default=1e4, show_default=True)
@click.option("--M", "const_M", type=int, default=1, show_default=True)
@click.option("--B", "const_B", type=float, default=0.0, show_default=True)
@click.option("--exponents", default="1", show_default=True)
@click.option("--shifts", default="0", show_default=True)
@click.option("--sigma", type=float, default=0.5, show_default=True)
@click.option("--strict", is_flag=True, help="Fail on a degenerate schedule instead of running with J=1.")
@common
@click.pass_context
def harper_census(ctx, X, const_M, const_B, exponents, shifts, sigma, strict, threads, out, fmt, seed, plot):
    """Class census S(0)..S(J) of the family."""
    a, t = _float_list(exponents), _float_list(shifts)
    _run(
        ctx,
        lambda: ex.verify_harper_census(X, const_M, const_B, a, t, sigma, strict=strict, threads=threads),
        out,
        fmt,
        plot,
    )


@verify.command()
@click.option("--d", "ds", default="1,3,5,7,11,13,15", show_default=True)
@click.option("--ts", default="0,1,2,5,10", show_default=True)
@common
@click.pass_context
def funceq(ctx, ds, ts, threads, out, fmt, seed, plot):
    """Functional-equation residuals of the completed L-function."""
    _run(ctx, lambda: ex.verify_funceq(_int_list(ds), _float_list(ts)), out, fmt, plot)


@main.command()
@click.option("--in", "inputs", multiple=True, help="Report file or glob (repeatable).")
@click.argument("extra", nargs=-1)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--plot", is_flag=True)
@click.pass_context
def report(ctx, inputs, extra, out, fmt, plot):
    """Merge CSV reports into one table with a source column."""
    files = []
    for pattern in (*inputs, *extra):
        matches = sorted(glob.glob(pattern))
        files.extend(matches if matches else [p for p in [pattern] if Path(p).is_file()])
    if not files:
        click.echo("no report files matched; nothing written", err=True)
        ctx.exit(EXIT_EMPTY)
    rows = []
    kinds = []
    for f in files:
        try:
            head, _, recs = read_csv_report(f)
        except (ReportError, OSError, UnicodeDecodeError) as exc:
            click.echo(f"cannot read report: {exc}", err=True)
            ctx.exit(EXIT_CONFIG)
        kinds.append(head.get("report", "?"))
        for r in recs:
            rows.append({"source": Path(f).name, "kind": head.get("report", "?"), **r})
    merged = Report("merged", rows, {"inputs": [Path(f).name for f in files]}, {"kinds": sorted(set(kinds))})
    _emit(merged, out, fmt, plot)


@main.command()
@click.argument("report_path", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def plot(ctx, report_path):
    """Write a plotting script next to an existing CSV report."""
    try:
        path = emit_plot_script(report_path)
    except ReportError as exc:
        click.echo(f"cannot parse report: {exc}", err=True)
        ctx.exit(EXIT_CONFIG)
    click.echo(str(path))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
