# =============================================================
#  solvers/methods.py – HOPM, GEAP, RHOPM, HOPMM-I/II, QEHOPM
# =============================================================
"""
Six fixed-point iterations for x = Px^{m-1} on the probability simplex.

HOPM     x_k = Px_{k-1}^{m-1}
GEAP     x_k = proj(Px_{k-1}^{m-1} + α_k x_{k-1}),  α_k from λ_min of the Hessian
RHOPM    x_k = proj(γ·Px_{k-1}^{m-1} + (1−γ)·x_{k-1})
HOPMM-I  power step; every `period` steps x_k ← proj(x_k + β(x_{k-1} − x_{k-2}))
HOPMM-II power step; every `period` steps x_k ← proj(x_k + η(x_k − x_{k-1}))
QEHOPM   power step; every `period` steps x_k ← quadratic extrapolation

The accelerated methods stop on the move of the plain power step and skip
the acceleration on the step where that test passes.

All of them accept any operator with ``order``, ``dim``, ``apply`` and
``apply_matrix``, so a PageRankProblem is solved by the same code.
"""

from __future__ import annotations

import logging
from typing import Callable, Deque, Dict, Tuple

import numpy as np
import scipy.linalg

from config.settings import GEAP_MAX_DIM
from markov.errors import SolverError
from markov.tensor import ProbVector, proj
from solvers.config import Method, SolverConfig
from solvers.driver import FixedPointOperator, Step, run_iteration
from solvers.extrapolation import quadratic_extrapolation
from solvers.report import ExtrapolationEvent, SolveReport

_LOG = logging.getLogger(__name__)


def _config_for(cfg: SolverConfig, method: Method) -> SolverConfig:
    if cfg.method is method:
        return cfg
    # re-validate: HOPMM-I/II require their momentum parameter
    return SolverConfig.model_validate({**cfg.model_dump(), "method": method})


def _power(op: FixedPointOperator, x: ProbVector) -> Tuple[np.ndarray, ProbVector]:
    """(Px^{m-1}, its simplex-normalised copy).

    The mass of Px^{m-1} is (Σx)^{m-1}, so an unnormalised loop would square
    any roundoff in Σx every step once m ≥ 3.
    """
    image = op.apply(x)
    return image, proj(image)


def _power_delta(op: FixedPointOperator, history: Deque[ProbVector]) -> Tuple[np.ndarray, ProbVector, float]:
    """Power step plus its 1-norm move δ, the stopping quantity of the accelerated methods."""
    image, x = _power(op, history[-1])
    return image, x, float(np.abs(x - history[-1]).sum())


# ──────────────────────────────────────────────────────────────────────────────
# HOPM / RHOPM
# ──────────────────────────────────────────────────────────────────────────────
def solve_hopm(op: FixedPointOperator, cfg: SolverConfig = SolverConfig()) -> SolveReport:
    cfg = _config_for(cfg, Method.HOPM)

    def step(k: int, history: Deque[ProbVector]) -> Step:
        image, x = _power(op, history[-1])
        return Step(x, image)

    return run_iteration(op, cfg, step)


def solve_rhopm(op: FixedPointOperator, cfg: SolverConfig = SolverConfig(method=Method.RHOPM)) -> SolveReport:
    cfg = _config_for(cfg, Method.RHOPM)
    gamma = cfg.gamma

    def step(k: int, history: Deque[ProbVector]) -> Step:
        x_prev = history[-1]
        image = op.apply(x_prev)
        return Step(proj(gamma * image + (1.0 - gamma) * x_prev), image)

    return run_iteration(op, cfg, step)


# ──────────────────────────────────────────────────────────────────────────────
# GEAP
# ──────────────────────────────────────────────────────────────────────────────
def _lambda_min(H: np.ndarray, k: int, symmetric: bool = True) -> float:
    """Smallest eigenvalue; for a nonsymmetric H, the smallest real part."""
    try:
        if symmetric:
            lam = scipy.linalg.eigvalsh(H, subset_by_index=[0, 0])[0]
        else:
            lam = np.min(scipy.linalg.eigvals(H).real)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as err:
        raise SolverError(f"eigenvalue routine failed: {err}", iteration=k) from err
    if not np.isfinite(lam):
        raise SolverError("non-finite smallest eigenvalue", iteration=k)
    return float(lam)


def solve_geap(op: FixedPointOperator, cfg: SolverConfig = SolverConfig(method=Method.GEAP)) -> SolveReport:
    """Shifted power method with an adaptive shift from the Hessian's λ_min.

    Px^{m-2} is not symmetric for a general transition tensor.  By default its
    symmetric part is used, H = m(m−1)·(M + Mᵀ)/2; with ``geap_hessian="nonsym"``
    H = m(m−1)·M and λ_min is the smallest real part of its spectrum.
    """
    cfg = _config_for(cfg, Method.GEAP)
    if op.dim > GEAP_MAX_DIM:
        raise SolverError(f"GEAP needs a dense eigendecomposition; n={op.dim} exceeds {GEAP_MAX_DIM}")
    m, tau = op.order, cfg.tau
    symmetric = cfg.geap_hessian == "sym"

    def step(k: int, history: Deque[ProbVector]) -> Step:
        x_prev = history[-1]
        M = op.apply_matrix(x_prev)
        image = M @ x_prev
        H = m * (m - 1) * ((M + M.T) / 2.0 if symmetric else M)
        alpha = max(0.0, (tau - _lambda_min(H, k, symmetric)) / m)
        return Step(proj(image + alpha * x_prev), image)

    return run_iteration(op, cfg, step)


# ──────────────────────────────────────────────────────────────────────────────
# momentum
# ──────────────────────────────────────────────────────────────────────────────
def solve_hopmm1(op: FixedPointOperator, cfg: SolverConfig) -> SolveReport:
    cfg = _config_for(cfg, Method.HOPMM1)
    beta, period, tol = cfg.beta, cfg.resolved_period, cfg.tol

    def step(k: int, history: Deque[ProbVector]) -> Step:
        image, x, delta = _power_delta(op, history)
        if delta < tol or k % period != 0 or len(history) < 2:
            return Step(x, image, delta)
        x = proj(x + beta * (history[-1] - history[-2]))
        return Step(x, image, delta, ExtrapolationEvent(k, True, "momentum"))

    return run_iteration(op, cfg, step)


def solve_hopmm2(op: FixedPointOperator, cfg: SolverConfig) -> SolveReport:
    cfg = _config_for(cfg, Method.HOPMM2)
    eta, period, tol = cfg.eta, cfg.resolved_period, cfg.tol

    def step(k: int, history: Deque[ProbVector]) -> Step:
        image, x, delta = _power_delta(op, history)
        if delta < tol or k % period != 0:
            return Step(x, image, delta)
        x = proj(x + eta * (x - history[-1]))
        return Step(x, image, delta, ExtrapolationEvent(k, True, "momentum"))

    return run_iteration(op, cfg, step)


# ──────────────────────────────────────────────────────────────────────────────
# quadratic extrapolation
# ──────────────────────────────────────────────────────────────────────────────
def solve_qehopm(op: FixedPointOperator, cfg: SolverConfig = SolverConfig(method=Method.QEHOPM)) -> SolveReport:
    """Power method with quadratic extrapolation every `period` steps.

    The stopping test uses the plain power step δ = ‖Px_{k-1}^{m-1} − x_{k-1}‖₁;
    once it passes, the iterate is returned without extrapolating.
    """
    cfg = _config_for(cfg, Method.QEHOPM)
    period, tol = cfg.resolved_period, cfg.tol

    def step(k: int, history: Deque[ProbVector]) -> Step:
        image, x, delta = _power_delta(op, history)
        if delta < tol or k % period != 0 or len(history) < 3:
            return Step(x, image, delta)

        ex = quadratic_extrapolation(history[-3], history[-2], history[-1], x)
        if ex.skipped:
            _LOG.warning("QEHOPM k=%d: extrapolation skipped (%s)", k, ex.skip_reason)
            return Step(x, image, delta, ExtrapolationEvent(k, False, ex.skip_reason, ex.coeffs))
        return Step(ex.x, image, delta, ExtrapolationEvent(k, True, None, ex.coeffs))

    return run_iteration(op, cfg, step)


# ──────────────────────────────────────────────────────────────────────────────
# dispatcher
# ──────────────────────────────────────────────────────────────────────────────
SOLVERS: Dict[Method, Callable[[FixedPointOperator, SolverConfig], SolveReport]] = {
    Method.HOPM:   solve_hopm,
    Method.GEAP:   solve_geap,
    Method.RHOPM:  solve_rhopm,
    Method.HOPMM1: solve_hopmm1,
    Method.HOPMM2: solve_hopmm2,
    Method.QEHOPM: solve_qehopm,
}


def solve(op: FixedPointOperator, cfg: SolverConfig) -> SolveReport:
    return SOLVERS[cfg.method](op, cfg)
