# ============================================================================
#  bench/report_manager.py  – handles on-disk benchmark output
# ============================================================================
"""
Disk layout
───────────
<out_dir>/
    ├── <campaign>.json   (full report, meta + rows)
    ├── <campaign>.csv    (fixture,method,params,it,rr,wall_time)
    └── <campaign>.md     (markdown table, grouped by fixture)
"""

from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path
from typing import Union

from bench.harness import BenchReport, format_param
from config.settings import FLOAT_FORMAT
from solvers.config import Method

_LOG = logging.getLogger(__name__)

CSV_HEADER = ["fixture", "method", "params", "it", "rr", "wall_time"]
FORMATS = ("json", "csv", "md")
FORMAT_ALIASES = {"md-table": "md"}
FORMAT_CHOICES = FORMATS + tuple(FORMAT_ALIASES)
_SUFFIX = {"json": ".json", "csv": ".csv", "md": ".md"}

_SYMBOL = {"beta": "β", "eta": "η", "gamma": "γ", "tau": "τ", "theta": "θ", "period": "p", "geap_hessian": "H"}


# ─────────────────────────────────────────────────────────────────────────
# rendering
# ─────────────────────────────────────────────────────────────────────────
def render_json(report: BenchReport, include_wall_time: bool = True) -> str:
    return json.dumps(report.to_dict(include_wall_time), indent=2, ensure_ascii=False) + "\n"


def render_csv(report: BenchReport, include_wall_time: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in report.rows:
        wall = FLOAT_FORMAT % r.wall_time if include_wall_time else ""
        w.writerow([r.fixture, r.method, r.params_text(), r.it, FLOAT_FORMAT % r.rr, wall])
    return buf.getvalue()


def _algorithm_label(method: str, params: dict) -> str:
    label = Method(method).label
    shown = {k: v for k, v in params.items() if k != "theta"}
    if not shown:
        return label
    inner = ", ".join(f"{_SYMBOL.get(k, k)}={format_param(v)}" for k, v in sorted(shown.items()))
    return f"{label} ({inner})"


def render_markdown(report: BenchReport, include_wall_time: bool = True) -> str:
    """One table, rows grouped by fixture; the fixture name is printed once per group."""
    has_ref = any(r.expected_it is not None for r in report.rows)
    head = ["Examples", "Algorithm"]
    if report.campaign == "pagerank":
        head.append("θ")
    if include_wall_time:
        head.append("CPU")
    head += ["IT", "RR"]
    if has_ref:
        head += ["IT (ref)", "RR (ref)", "status"]

    lines = ["| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
    previous = None
    for r in report.rows:
        cells = [f"({r.fixture})" if report.campaign == "table1" else r.fixture]
        if r.fixture == previous:
            cells[0] = ""
        previous = r.fixture
        cells.append(_algorithm_label(r.method, r.params))
        if report.campaign == "pagerank":
            cells.append(f"{r.theta:g}")
        if include_wall_time:
            cells.append(f"{r.wall_time:.4f}")
        cells += [str(r.it) if r.converged else "−", f"{r.rr:.2e}"]
        if has_ref:
            status = "pass" if r.passed else ("fail" if r.enforced else "reported")
            cells += [str(r.expected_it), f"{r.expected_rr:.2e}", status]
        lines.append("| " + " | ".join(cells) + " |")

    if report.campaign == "pagerank":
        lines += ["", "| θ | method | converged | mean IT |", "|---|---|---|---|"]
        for s in report.summary():
            mean = "−" if s["mean_it"] is None else f"{s['mean_it']:.1f}"
            lines.append(f"| {s['theta']:g} | {Method(s['method']).label} | {s['converged']}/{s['runs']} | {mean} |")
    return "\n".join(lines) + "\n"


_RENDER = {"json": render_json, "csv": render_csv, "md": render_markdown}


def emit(report: BenchReport, fmt: str, path: Union[str, Path], include_wall_time: bool = True) -> Path:
    """Write ``report`` as json, csv or md (alias md-table) to ``path``."""
    fmt = FORMAT_ALIASES.get(fmt, fmt)
    if fmt not in _RENDER:
        raise ValueError(f"unknown report format {fmt!r}; expected one of {FORMAT_CHOICES}")
    path = Path(path)
    payload = _RENDER[fmt](report, include_wall_time)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(payload, encoding="utf-8")
    except OSError as err:
        raise OSError(f"cannot write report {path}: {err}") from err
    _LOG.info("wrote %s report to %s", fmt, path)
    return path


def format_for(path: Union[str, Path]) -> str:
    suffix = Path(path).suffix.lower()
    return {".csv": "csv", ".md": "md"}.get(suffix, "json")


# ─────────────────────────────────────────────────────────────────────────
class ReportManager:
    """Owns all disk IO for one output directory."""

    def __init__(self, base_dir: Union[str, Path] = "reports"):
        self.base_dir = Path(base_dir)
        self.base_dir.mkdir(parents=True, exist_ok=True)

    def save(self, report: BenchReport, include_wall_time: bool = True) -> dict:
        """All three formats, named after the campaign."""
        return {
            fmt: emit(report, fmt, self.base_dir / f"{report.campaign}{_SUFFIX[fmt]}", include_wall_time)
            for fmt in FORMATS
        }

