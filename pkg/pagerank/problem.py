# =============================================================
#  pagerank/problem.py – multilinear PageRank as a fixed-point operator
# =============================================================
"""
Multilinear PageRank asks for x = θP̂x^{m-1} + (1−θ)v on the simplex.  On the
simplex V x^{m-1} = v for the tensor V with v_{i1} in every column, so the
problem is the stationary equation of P = θP̂ + (1−θ)V.  V is never built
except by `materialize`, which exists for small-instance cross-checks.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from config.settings import DENSE_LIMIT
from markov.errors import DimensionMismatchError, TensorStructureError
from markov.tensor import ProbVector, StochasticTensor, _check_dim, as_prob_vector, uniform_vector
from solvers.config import SolverConfig
from solvers.methods import solve
from solvers.report import SolveReport

_LOG = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PageRankProblem:
    base: StochasticTensor
    damping: float
    teleport: Optional[ProbVector] = field(default=None)

    def __post_init__(self):
        if not 0.0 < self.damping < 1.0:
            raise ValueError(f"damping θ must lie in (0, 1), got {self.damping}")
        v = uniform_vector(self.base.dim) if self.teleport is None else self.teleport
        try:
            v = as_prob_vector(v, n=self.base.dim)
        except DimensionMismatchError as err:
            raise DimensionMismatchError(f"teleport vector: {err}") from None
        v.setflags(write=False)
        object.__setattr__(self, "teleport", v)

    # the operator surface the solvers expect
    @property
    def order(self) -> int:
        return self.base.order

    @property
    def dim(self) -> int:
        return self.base.dim

    def apply(self, x: ProbVector) -> ProbVector:
        return pagerank_apply(self, x)

    def apply_matrix(self, x: ProbVector) -> np.ndarray:
        """θ·P̂x^{m-2} + (1−θ)·v1ᵀ."""
        M = self.damping * self.base.apply_matrix(x)
        M += (1.0 - self.damping) * np.outer(self.teleport, np.ones(self.dim))
        return M

    def materialize(self) -> StochasticTensor:
        """Dense θP̂ + (1−θ)V; small instances only."""
        n, m = self.dim, self.order
        if n ** m > DENSE_LIMIT:
            raise TensorStructureError(f"refusing to materialise {n}^{m} entries")
        V = np.broadcast_to(self.teleport.reshape((n,) + (1,) * (m - 1)), (n,) * m)
        return StochasticTensor.from_dense(self.damping * self.base.to_dense() + (1.0 - self.damping) * V)

    def __repr__(self) -> str:
        return f"PageRankProblem(θ={self.damping}, base={self.base!r})"


def pagerank_apply(p: PageRankProblem, x: ProbVector) -> ProbVector:
    x = _check_dim(p.base, x)
    return p.damping * p.base.apply(x) + (1.0 - p.damping) * p.teleport


def solve_pagerank(p: PageRankProblem, cfg: SolverConfig) -> SolveReport:
    _LOG.debug("solving %r with %s", p, cfg.method.label)
    return solve(p, cfg)
