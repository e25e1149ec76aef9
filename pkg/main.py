# =============================================================
#  main.py  – command-line front end for the higher-order solvers
# =============================================================
#!/usr/bin/env python3
"""
main.py – stationary distributions of higher-order Markov chains and
          multilinear PageRank from the command line.

    python main.py solve --method qehopm tensor.txt
    python main.py solve --fixture i --method hopmm1 --trace trace.csv
    python main.py pagerank --theta 0.85 --method qehopm tensor.txt
    python main.py gen --order 3 --dim 4 --density 0.5 --seed 7 --out r.txt
    python main.py validate tensor.txt
    python main.py conditions tensor.txt
    python main.py bench table1 --out report.md --strict
    python main.py bench pagerank --seeds 0..28 --thetas 0.7,0.99

JSON goes to stdout; status lines go to stderr with a [TAG] prefix.
Exit codes: 0 ok, 1 library / input error, 2 acceptance failure (--strict).
"""

from __future__ import annotations

import functools
import json
import logging
import sys
from typing import List, Optional

import click
from pydantic import ValidationError

from bench.fixtures import FIXTURE_NAMES, default_params, load_fixture
from bench.harness import run_pagerank_sweep, run_table1
from bench.report_manager import FORMAT_CHOICES, ReportManager, emit, format_for, render_json
from config.settings import DEFAULT_MAX_ITER, DEFAULT_TOL, PAGERANK_THETAS, STOCHASTIC_TOL
from markov.conditions import condition_report
from markov.errors import HigherOrderMarkovError
from markov.tensor import validate
from markov.tensor_io import load_tensor, load_vector, save_tensor
from pagerank.generator import gen_random_tensor
from pagerank.problem import PageRankProblem, solve_pagerank
from solvers.config import Method, SolverConfig
from solvers.methods import solve
from solvers.report import write_trace

_LOG = logging.getLogger("main")

METHOD_CHOICE = click.Choice([m.value for m in Method], case_sensitive=False)


# ──────────────────────────────────────────────────────────────────────────────
def _status(tag: str, message: str) -> None:
    click.echo(f"[{tag}] {message}", err=True)


def _emit_json(payload) -> None:
    click.echo(json.dumps(payload, indent=2, ensure_ascii=False))


def _fail(message: str, code: int = 1) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def handle_errors(fn):
    """Map library and I/O errors to a one-line message and exit code 1."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (HigherOrderMarkovError, OSError) as err:
            _fail(str(err))
        except ValidationError as err:
            first = err.errors()[0]
            _fail(f"invalid solver configuration: {first.get('msg', err)}")
        except ValueError as err:
            _fail(str(err))
    return wrapper


def _parse_seeds(text: str) -> List[int]:
    """``0..28`` (inclusive) or ``1,4,7``."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(s) for s in text.split(",") if s.strip()]


def _parse_floats(text: str) -> List[float]:
    return [float(s) for s in text.split(",") if s.strip()]


def _solver_config(method: str, tol: float, max_iter: int, beta, eta, gamma, tau, geap_hessian, period,
                   x0=None, record_iterates: bool = False, fixture: Optional[str] = None) -> SolverConfig:
    m = Method(method.lower())
    fields = default_params(fixture, m)
    given = {"beta": beta, "eta": eta, "gamma": gamma, "tau": tau, "geap_hessian": geap_hessian,
             "period": period}
    fields.update({k: v for k, v in given.items() if v is not None})
    if m is Method.HOPMM1 and "beta" not in fields:
        raise ValueError("hopmm1 needs --beta (no fixture default)")
    if m is Method.HOPMM2 and "eta" not in fields:
        raise ValueError("hopmm2 needs --eta (no fixture default)")
    return SolverConfig(method=m, tol=tol, max_iter=max_iter, x0=x0,
                        record_iterates=record_iterates, **fields)


def solver_options(fn):
    for opt in reversed([
        click.option("--method", "-m", type=METHOD_CHOICE, default="hopm", show_default=True),
        click.option("--tol", type=float, default=DEFAULT_TOL, show_default=True),
        click.option("--max-iter", type=int, default=DEFAULT_MAX_ITER, show_default=True),
        click.option("--beta", type=float, default=None, help="HOPMM-I momentum."),
        click.option("--eta", type=float, default=None, help="HOPMM-II momentum."),
        click.option("--gamma", type=float, default=None, help="RHOPM relaxation (default 1.2)."),
        click.option("--tau", type=float, default=None, help="GEAP tolerance (default 1e-6)."),
        click.option("--geap-hessian", type=click.Choice(["sym", "nonsym"]), default=None,
                     help="GEAP λ_min from the symmetric part (default) or the raw Hessian."),
        click.option("--period", type=int, default=None, help="Acceleration cadence."),
        click.option("--x0", "x0_path", type=click.Path(dir_okay=False), default=None,
                     help="Start vector file (default uniform)."),
        click.option("--repair", is_flag=True, help="Renormalise tensor columns on load."),
        click.option("--trace", "trace_path", type=click.Path(dir_okay=False), default=None,
                     help="Write iteration,step_norm,residual CSV."),
        click.option("--no-wall-time", is_flag=True, help="Omit wall_time for reproducible output."),
    ]):
        fn = opt(fn)
    return fn


# ──────────────────────────────────────────────────────────────────────────────
@click.group()
@click.option("--log-level", default="WARNING", show_default=True,
              type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False))
def cli(log_level: str) -> None:
    """Higher-order Markov chain and multilinear PageRank solvers."""
    logging.basicConfig(level=log_level.upper(), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s", force=True)


@cli.command("solve")
@click.argument("tensor_path", required=False, type=click.Path(dir_okay=False))
@click.option("--fixture", type=click.Choice(FIXTURE_NAMES), default=None,
              help="Use a built-in fixture (and its method parameters).")
@solver_options
@click.option("--record-iterates", is_flag=True)
@handle_errors
def solve_cmd(tensor_path, fixture, method, tol, max_iter, beta, eta, gamma, tau, geap_hessian, period,
              x0_path, repair, trace_path, no_wall_time, record_iterates):
    """Stationary vector x = Px^{m-1} of a transition probability tensor."""
    if (tensor_path is None) == (fixture is None):
        raise click.UsageError("give exactly one of TENSOR_PATH or --fixture")
    tensor = load_fixture(fixture).tensor if fixture else load_tensor(tensor_path, repair=repair)
    x0 = load_vector(x0_path, n=tensor.dim) if x0_path else None
    cfg = _solver_config(method, tol, max_iter, beta, eta, gamma, tau, geap_hessian, period, x0,
                         record_iterates, fixture)

    report = solve(tensor, cfg)
    _status("SOLVE", f"{cfg.method.label}: {'converged' if report.converged else 'NOT converged'} "
                     f"IT={report.iterations} RR={report.residual:.3e}")
    if trace_path:
        write_trace(report, trace_path)
        _status("SOLVE", f"trace written to {trace_path}")
    _emit_json(report.to_dict(include_wall_time=not no_wall_time))


@cli.command("pagerank")
@click.argument("tensor_path", type=click.Path(dir_okay=False))
@click.option("--theta", type=float, default=0.85, show_default=True, help="Damping θ ∈ (0, 1).")
@click.option("--teleport", default="uniform", show_default=True, help="'uniform' or a vector file.")
@solver_options
@handle_errors
def pagerank_cmd(tensor_path, theta, teleport, method, tol, max_iter, beta, eta, gamma, tau, geap_hessian,
                 period, x0_path, repair, trace_path, no_wall_time):
    """Multilinear PageRank x = θP̂x^{m-1} + (1−θ)v."""
    base = load_tensor(tensor_path, repair=repair)
    v = None if teleport == "uniform" else load_vector(teleport, n=base.dim)
    problem = PageRankProblem(base, theta, v)
    x0 = load_vector(x0_path, n=base.dim) if x0_path else None
    cfg = _solver_config(method, tol, max_iter, beta, eta, gamma, tau, geap_hessian, period, x0)

    report = solve_pagerank(problem, cfg)
    _status("SOLVE", f"{cfg.method.label} θ={theta:g}: "
                     f"{'converged' if report.converged else 'NOT converged'} "
                     f"IT={report.iterations} RR={report.residual:.3e}")
    if trace_path:
        write_trace(report, trace_path)
    _emit_json(report.to_dict(include_wall_time=not no_wall_time))


@cli.command("gen")
@click.option("--order", type=int, required=True)
@click.option("--dim", type=int, required=True)
@click.option("--density", type=float, default=1.0, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--blend", type=float, default=0.0, show_default=True,
              help="Mix toward the uniform tensor (δ_m ≥ blend).")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@handle_errors
def gen_cmd(order, dim, density, seed, blend, out_path):
    """Seeded random transition probability tensor."""
    tensor = gen_random_tensor(order, dim, density, seed, uniform_blend=blend)
    save_tensor(tensor, out_path)
    _status("GEN", f"{tensor!r} → {out_path}")


@cli.command("validate")
@click.argument("tensor_path", type=click.Path(dir_okay=False))
@click.option("--tol", type=float, default=STOCHASTIC_TOL, show_default=True)
@handle_errors
def validate_cmd(tensor_path, tol):
    """Check nonnegativity and unit column sums; exit 1 when violated."""
    tensor = load_tensor(tensor_path, check=False)
    result = validate(tensor, tol=tol)
    _emit_json({"path": str(tensor_path), "order": tensor.order, "dim": tensor.dim, **result.to_dict()})
    if not result.ok:
        _fail(f"{tensor_path}: {result.describe()}")


@cli.command("conditions")
@click.argument("tensor_path", type=click.Path(dir_okay=False))
@click.option("--repair", is_flag=True)
@handle_errors
def conditions_cmd(tensor_path, repair):
    """δ_m, η_m and the uniqueness / momentum bounds."""
    tensor = load_tensor(tensor_path, repair=repair)
    _emit_json(condition_report(tensor).to_dict())


# ──────────────────────────────────────────────────────────────────────────────
@cli.group("bench")
def bench() -> None:
    """Reproduce the reference experiments."""


def _write_or_print(report, out_path, out_dir, no_wall_time, fmt):
    if out_dir:
        paths = ReportManager(out_dir).save(report, include_wall_time=not no_wall_time)
        _status("BENCH", f"reports written to {', '.join(str(p) for p in paths.values())}")
    if out_path:
        emit(report, fmt or format_for(out_path), out_path, include_wall_time=not no_wall_time)
        _status("BENCH", f"report written to {out_path}")
    elif not out_dir:
        click.echo(render_json(report, include_wall_time=not no_wall_time), nl=False)


@bench.command("table1")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
@click.option("--out-dir", type=click.Path(file_okay=False), default=None,
              help="Write <campaign>.json, .csv and .md into this directory.")
@click.option("--format", "fmt", type=click.Choice(FORMAT_CHOICES), default=None,
              help="Output format (default from --out suffix).")
@click.option("--workers", type=int, default=None)
@click.option("--strict", is_flag=True, help="Exit 2 if an enforced row misses its reference.")
@click.option("--no-wall-time", is_flag=True)
@click.option("--progress/--no-progress", default=False)
@handle_errors
def bench_table1(out_path, out_dir, fmt, workers, strict, no_wall_time, progress):
    """Six methods × fixtures (i)–(iv)."""
    report = run_table1(workers=workers, progress=progress)
    _write_or_print(report, out_path, out_dir, no_wall_time, fmt)
    for row in report.rows:
        if row.enforced and not row.passed:
            _status("BENCH", f"({row.fixture}) {Method(row.method).label}: IT={row.it}, reference {row.expected_it}")
    _status("BENCH", f"{len(report.rows)} rows, {len(report.failures)} enforced failure(s)")
    if strict and not report.ok:
        sys.exit(2)


@bench.command("pagerank")
@click.option("--seeds", default="0..28", show_default=True, help="'a..b' or comma list.")
@click.option("--thetas", default=",".join(f"{t:g}" for t in PAGERANK_THETAS), show_default=True)
@click.option("--methods", default="hopm,rhopm,qehopm", show_default=True)
@click.option("--beta", type=float, default=None)
@click.option("--eta", type=float, default=None)
@click.option("--include-fixtures", is_flag=True, help="Also wrap fixtures (i)–(iv) as P̂.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
@click.option("--out-dir", type=click.Path(file_okay=False), default=None,
              help="Write <campaign>.json, .csv and .md into this directory.")
@click.option("--format", "fmt", type=click.Choice(FORMAT_CHOICES), default=None)
@click.option("--workers", type=int, default=None)
@click.option("--strict", is_flag=True, help="Exit 2 if the reliability pattern is violated.")
@click.option("--no-wall-time", is_flag=True)
@click.option("--progress/--no-progress", default=False)
@handle_errors
def bench_pagerank(seeds, thetas, methods, beta, eta, include_fixtures, out_path, out_dir, fmt, workers,
                   strict, no_wall_time, progress):
    """θ-sweep over seeded random tensors."""
    method_list = [Method(m.strip().lower()) for m in methods.split(",") if m.strip()]
    params = {}
    if Method.HOPMM1 in method_list:
        if beta is None:
            raise ValueError("hopmm1 in --methods needs --beta")
        params[Method.HOPMM1] = {"beta": beta}
    if Method.HOPMM2 in method_list:
        if eta is None:
            raise ValueError("hopmm2 in --methods needs --eta")
        params[Method.HOPMM2] = {"eta": eta}

    report = run_pagerank_sweep(
        seeds=_parse_seeds(seeds), thetas=_parse_floats(thetas), methods=method_list,
        method_params=params, include_fixtures=include_fixtures, workers=workers, progress=progress,
    )
    _write_or_print(report, out_path, out_dir, no_wall_time, fmt)
    for s in report.summary():
        mean = "−" if s["mean_it"] is None else f"{s['mean_it']:.1f}"
        _status("BENCH", f"θ={s['theta']:g} {Method(s['method']).label}: "
                         f"{s['converged']}/{s['runs']} converged, mean IT {mean}")
    flags = report.reliability_flags()
    for flag in flags:
        _status("BENCH", f"flag: {flag}")
    if strict and flags:
        sys.exit(2)


if __name__ == "__main__":
    cli()
