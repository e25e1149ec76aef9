# =============================================================
#  solvers/driver.py – shared fixed-point iteration loop
# =============================================================
"""
Every solver is the same loop around a different step function:

    for k = 1 .. max_iter:
        step  = step_fn(k, history)        # exactly one contraction
        x_k   = step.x
        stop when step_norm < tol

``history`` holds the last four stored iterates, newest last, so a step can
reach back to x_{k-3}.  The exit residual is recomputed from scratch on the
returned vector.
"""

from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass
from typing import Callable, Deque, Optional, Protocol

import numpy as np

from config.settings import ITERATE_CHECK_TOL
from markov.errors import SolverError
from markov.tensor import ProbVector, as_prob_vector, residual, uniform_vector
from solvers.config import SolverConfig
from solvers.report import ExtrapolationEvent, HistoryRow, SolveReport

_LOG = logging.getLogger(__name__)


class FixedPointOperator(Protocol):
    """Anything with a tensor-like contraction: StochasticTensor, PageRankProblem."""
    order: int
    dim: int

    def apply(self, x: ProbVector) -> ProbVector: ...
    def apply_matrix(self, x: ProbVector) -> np.ndarray: ...


@dataclass
class Step:
    x: ProbVector                   # stored iterate x_k
    image: np.ndarray               # Px_{k-1}^{m-1}, used to back-fill the residual of x_{k-1}
    step_norm: Optional[float] = None
    event: Optional[ExtrapolationEvent] = None


StepFn = Callable[[int, Deque[ProbVector]], Step]


def starting_vector(op: FixedPointOperator, cfg: SolverConfig) -> ProbVector:
    if cfg.x0 is None:
        return uniform_vector(op.dim)
    return as_prob_vector(cfg.x0, n=op.dim)


def _check_iterate(x: np.ndarray, k: int) -> None:
    if not np.all(np.isfinite(x)):
        raise SolverError("non-finite iterate", iteration=k)
    if x.min() < 0.0 or abs(float(x.sum()) - 1.0) > ITERATE_CHECK_TOL:
        raise SolverError(
            f"iterate left the simplex (min {x.min():.3g}, sum {x.sum():.17g})", iteration=k)


def run_iteration(op: FixedPointOperator, cfg: SolverConfig, step_fn: StepFn) -> SolveReport:
    x = starting_vector(op, cfg)
    history: Deque[ProbVector] = deque([x], maxlen=4)
    rows: list[HistoryRow] = []
    events: list[ExtrapolationEvent] = []
    iterates = [x] if cfg.record_iterates else None

    converged = False
    t0 = time.perf_counter()
    for k in range(1, cfg.max_iter + 1):
        x_prev = history[-1]
        step = step_fn(k, history)
        if rows:
            rows[-1].residual = float(np.abs(step.image - x_prev).sum())

        x = step.x
        if __debug__:
            _check_iterate(x, k)
        step_norm = step.step_norm if step.step_norm is not None else float(np.abs(x - x_prev).sum())

        history.append(x)
        rows.append(HistoryRow(k, step_norm))
        if step.event is not None:
            events.append(step.event)
        if iterates is not None:
            iterates.append(x)
        _LOG.debug("%s k=%d step=%.3e", cfg.method.label, k, step_norm)

        if step_norm < cfg.tol:
            converged = True
            break
    wall = time.perf_counter() - t0

    rr = residual(op, x)
    rows[-1].residual = rr
    report = SolveReport(
        method=cfg.method,
        converged=converged,
        iterations=len(rows),
        final_x=x,
        residual=rr,
        residual_history=rows,
        wall_time=wall,
        extrapolation_events=events,
        iterates=iterates,
    )
    if converged:
        _LOG.info("%s converged: IT=%d RR=%.3e (%.4fs)", cfg.method.label, report.iterations, rr, wall)
    else:
        _LOG.warning("%s did not converge in %d iterations (last step %.3e, RR=%.3e)",
                     cfg.method.label, cfg.max_iter, rows[-1].step_norm, rr)
    return report
