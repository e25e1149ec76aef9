# =============================================================
#  solvers/report.py – solve outcome, history rows, trace CSV
# =============================================================
"""
A SolveReport is what every solver returns.  ``iterations`` counts tensor
contractions Px^{m-1}; momentum and extrapolation steps are free.

History rows are (iteration, ‖x_k − x_{k-1}‖₁, ‖Px_k^{m-1} − x_k‖₁).  The
residual of row k is only known once the next contraction has been made, so
the driver back-fills it; the last row gets the from-scratch exit residual.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from config.settings import FLOAT_FORMAT
from solvers.config import Method
from solvers.extrapolation import ExtrapolationCoeffs


@dataclass
class HistoryRow:
    iteration: int
    step_norm: float
    residual: float = float("nan")


@dataclass(frozen=True)
class ExtrapolationEvent:
    """One acceleration attempt: momentum or quadratic extrapolation."""
    iteration: int
    accepted: bool
    reason: Optional[str] = None
    coeffs: Optional[ExtrapolationCoeffs] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "iteration": self.iteration,
            "accepted": self.accepted,
            "reason": self.reason,
            "coeffs": None if self.coeffs is None else self.coeffs.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "ExtrapolationEvent":
        c = d.get("coeffs")
        coeffs = None if c is None else ExtrapolationCoeffs(c["gamma1"], c["gamma2"], c.get("gamma3", 1.0))
        return cls(int(d["iteration"]), bool(d["accepted"]), d.get("reason"), coeffs)


@dataclass
class SolveReport:
    method: Method
    converged: bool
    iterations: int
    final_x: np.ndarray
    residual: float
    residual_history: List[HistoryRow] = field(default_factory=list)
    wall_time: float = 0.0
    extrapolation_events: List[ExtrapolationEvent] = field(default_factory=list)
    iterates: Optional[List[np.ndarray]] = None

    @property
    def step_norm(self) -> float:
        return self.residual_history[-1].step_norm if self.residual_history else float("nan")

    @property
    def accepted_events(self) -> List[ExtrapolationEvent]:
        return [e for e in self.extrapolation_events if e.accepted]

    # ------------------------------------------------------------------
    def to_dict(self, include_wall_time: bool = True) -> Dict[str, Any]:
        d: Dict[str, Any] = {
            "method": self.method.value,
            "converged": self.converged,
            "iterations": self.iterations,
            "final_x": [float(v) for v in self.final_x],
            "residual": self.residual,
            "residual_history": [[r.iteration, r.step_norm, r.residual] for r in self.residual_history],
            "extrapolation_events": [e.to_dict() for e in self.extrapolation_events],
        }
        if include_wall_time:
            d["wall_time"] = self.wall_time
        if self.iterates is not None:
            d["iterates"] = [[float(v) for v in x] for x in self.iterates]
        return d

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "SolveReport":
        iterates = d.get("iterates")
        return cls(
            method=Method(d["method"]),
            converged=bool(d["converged"]),
            iterations=int(d["iterations"]),
            final_x=np.asarray(d["final_x"], dtype=float),
            residual=float(d["residual"]),
            residual_history=[HistoryRow(int(k), float(s), float(r)) for k, s, r in d["residual_history"]],
            wall_time=float(d.get("wall_time", 0.0)),
            extrapolation_events=[ExtrapolationEvent.from_dict(e) for e in d.get("extrapolation_events", [])],
            iterates=None if iterates is None else [np.asarray(x, dtype=float) for x in iterates],
        )


def write_trace(report: SolveReport, path: Union[str, Path]) -> Path:
    """CSV ``iteration,step_norm,residual`` for external plotting.

    ``step_norm`` is the stopping quantity of row k.  For HOPM, GEAP and RHOPM
    that is ‖x_k − x_{k-1}‖₁.  For HOPMM-I, HOPMM-II and QEHOPM it is the move
    of the plain power step from x_{k-1}, measured before any momentum or
    extrapolation, so it differs from ‖x_k − x_{k-1}‖₁ on accelerated rows.
    ``residual`` is ‖Px_k^{m-1} − x_k‖₁ of the stored iterate.
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["iteration", "step_norm", "residual"])
            for row in report.residual_history:
                w.writerow([row.iteration, FLOAT_FORMAT % row.step_norm, FLOAT_FORMAT % row.residual])
    except OSError as err:
        raise OSError(f"cannot write trace {path}: {err}") from err
    return path
