"""Report files: CSV (primary) and JSON, each with a metadata header carrying
the tool version, the echoed config and the frozen band table.

CSV layout: ``# key: value`` comment lines, then a header row, then one record
per row.  Floats are written with ``repr`` so output is byte-stable.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable

import numpy as np

from . import __version__
from .bands import BANDS

__all__ = ["ReportError", "Report", "render", "write_report", "read_csv_report", "emit_plot_script"]


class ReportError(ValueError):
    pass


def _fmt(v) -> str:
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return " ".join(_fmt(x) for x in v)
    return str(v)


class Report:
    """Rows plus metadata for one command run."""

    def __init__(self, kind: str, rows: Iterable[dict], config: dict | None = None, meta: dict | None = None):
        self.kind = kind
        self.rows = [dict(r) for r in rows]
        self.config = dict(config or {})
        self.meta = dict(meta or {})

    @property
    def columns(self) -> list[str]:
        cols: list[str] = []
        for r in self.rows:
            for k in r:
                if k not in cols:
                    cols.append(k)
        return cols

    def header(self) -> dict:
        head = {"tool": "quadlab", "version": __version__, "report": self.kind}
        for k in sorted(self.config):
            head[f"config.{k}"] = self.config[k]
        for k in sorted(self.meta):
            head[f"meta.{k}"] = self.meta[k]
        for k in BANDS:
            head[f"band.{k}"] = BANDS[k]
        return head


def render(report: Report, fmt: str = "csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        for k, v in report.header().items():
            buf.write(f"# {k}: {_fmt(v)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        cols = report.columns
        writer.writerow(cols)
        for r in report.rows:
            writer.writerow([_fmt(r.get(c, "")) for c in cols])
        return buf.getvalue()
    if fmt == "json":
        doc = {"header": report.header(), "columns": report.columns, "rows": report.rows}
        return json.dumps(doc, indent=2, sort_keys=False, default=_json_default) + "\n"
    raise ReportError(f"unknown format {fmt!r}")


def _json_default(v):
    if hasattr(v, "item"):
        return v.item()
    if isinstance(v, tuple):
        return list(v)
    raise TypeError(f"not serialisable: {type(v).__name__}")


def write_report(report: Report, path: str | Path, fmt: str = "csv") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(render(report, fmt))
    return path


def read_csv_report(path: str | Path) -> tuple[dict, list[str], list[dict]]:
    """(header, columns, rows); rows whose width differs from the header are errors."""
    path = Path(path)
    head: dict = {}
    cols: list[str] | None = None
    rows: list[dict] = []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.rstrip("\n")
            if not text:
                continue
            if text.startswith("#"):
                key, sep, val = text[1:].strip().partition(":")
                if not sep:
                    raise ReportError(f"{path}:{lineno}: malformed header line")
                head[key.strip()] = val.strip()
                continue
            fields = next(csv.reader([text]))
            if cols is None:
                cols = fields
                continue
            if len(fields) != len(cols):
                raise ReportError(
                    f"{path}:{lineno}: row has {len(fields)} fields, expected {len(cols)}"
                )
            rows.append(dict(zip(cols, fields)))
    if cols is None:
        raise ReportError(f"{path}: no header row")
    return head, cols, rows


# which columns to plot for each report kind: (x column, y columns, log-x)
_PLOT_COLUMNS = {
    "jutila": ("X", ["ratio"], True),
    "moment": ("X", ["ratio"], True),
    "harper-census": ("class_j", ["fraction"], False),
    "lemma22": ("X", ["ratio"], True),
    "envelope": ("index", ["ratio"], False),
    "funceq": ("t", ["residual"], False),
}


def emit_plot_script(report_path: str | Path) -> Path:
    """Write a gnuplot-style script next to the report.  It is never run here."""
    report_path = Path(report_path)
    head, cols, rows = read_csv_report(report_path)
    kind = head.get("report", "")
    xcol, ycols, logx = _PLOT_COLUMNS.get(kind, (cols[0], cols[1:2] or cols[:1], False))
    if xcol not in cols:
        xcol = cols[0]
    ycols = [c for c in ycols if c in cols] or [cols[-1]]
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set title '{kind or report_path.stem}'",
        f"set xlabel '{xcol}'",
        f"set ylabel '{', '.join(ycols)}'",
    ]
    if logx:
        lines.append("set logscale x")
    xi = cols.index(xcol) + 1
    style = "boxes" if kind == "harper-census" else "linespoints"
    plots = [f"'{report_path.name}' using {xi}:{cols.index(y) + 1} with {style}" for y in ycols]
    lines.append("plot " + ", ".join(plots))
    out = report_path.with_suffix(".plt")
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return out
