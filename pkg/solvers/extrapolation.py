# =============================================================
#  solvers/extrapolation.py – quadratic extrapolation kernel
# =============================================================
"""
Quadratic extrapolation from four successive iterates.

If x_{k-2}, x_{k-1}, x_k are B-images of x_{k-3} for a Markov matrix B whose
minimal polynomial has degree ≤ 3, that polynomial factors as
(λ − 1)(β0 + β1λ + β2λ²) and β0x_{k-2} + β1x_{k-1} + β2x_k is a multiple of
B's principal eigenvector.  The γ's are the least-squares solution of

    γ1·y_{k-2} + γ2·y_{k-1} = −y_k,     y_j = x_j − x_{k-3},  γ3 = 1,

obtained with a two-column Gram–Schmidt QR and back substitution, and

    β0 = γ1 + γ2 + γ3,   β1 = γ2 + γ3,   β2 = γ3.

The combination is renormalised by Σβ and pushed through proj().
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from config.settings import EXTRAPOLATION_GUARD
from markov.errors import DimensionMismatchError
from markov.tensor import ProbVector, proj

_LOG = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExtrapolationCoeffs:
    gamma1: float
    gamma2: float
    gamma3: float = 1.0

    @property
    def beta0(self) -> float:
        return self.gamma1 + self.gamma2 + self.gamma3

    @property
    def beta1(self) -> float:
        return self.gamma2 + self.gamma3

    @property
    def beta2(self) -> float:
        return self.gamma3

    @property
    def beta_sum(self) -> float:
        return self.beta0 + self.beta1 + self.beta2

    @property
    def alphas(self) -> Tuple[float, float, float]:
        """(α1, α2, α3): weights of x_k, x_{k-1}, x_{k-2}."""
        s = self.beta_sum
        return self.beta2 / s, self.beta1 / s, self.beta0 / s

    @property
    def convex(self) -> bool:
        return all(a >= 0.0 for a in self.alphas)

    def to_dict(self) -> dict:
        a1, a2, a3 = self.alphas
        return {
            "gamma1": self.gamma1, "gamma2": self.gamma2, "gamma3": self.gamma3,
            "beta0": self.beta0, "beta1": self.beta1, "beta2": self.beta2,
            "alpha1": a1, "alpha2": a2, "alpha3": a3,
        }


@dataclass(frozen=True)
class Extrapolation:
    """Outcome of one extrapolation attempt; ``x`` is None when skipped."""
    x: Optional[ProbVector]
    coeffs: Optional[ExtrapolationCoeffs]
    skip_reason: Optional[str] = None

    @property
    def skipped(self) -> bool:
        return self.x is None


# ──────────────────────────────────────────────────────────────────────────────
# least squares via two Gram–Schmidt steps
# ──────────────────────────────────────────────────────────────────────────────
def gram_schmidt_solve(
    Y: np.ndarray, rhs: np.ndarray, guard: float = EXTRAPOLATION_GUARD
) -> Optional[Tuple[float, float]]:
    """Least-squares solution of Y·g = rhs for a two-column Y; None if rank-deficient."""
    a1, a2 = Y[:, 0], Y[:, 1]

    r11 = float(np.linalg.norm(a1))
    if r11 < guard:
        return None
    q1 = a1 / r11

    r12 = float(q1 @ a2)
    v = a2 - r12 * q1
    r22 = float(np.linalg.norm(v))
    if r22 < guard:
        return None
    q2 = v / r22

    c1, c2 = float(q1 @ rhs), float(q2 @ rhs)
    g2 = c2 / r22
    g1 = (c1 - r12 * g2) / r11
    return g1, g2


def quadratic_extrapolation(
    x_km3: ProbVector,
    x_km2: ProbVector,
    x_km1: ProbVector,
    x_k: ProbVector,
    guard: float = EXTRAPOLATION_GUARD,
) -> Extrapolation:
    """Combine x_{k-2}, x_{k-1}, x_k into an eigenvector estimate (projected)."""
    xs = [np.asarray(v, dtype=float) for v in (x_km3, x_km2, x_km1, x_k)]
    if len({v.shape for v in xs}) != 1 or xs[0].ndim != 1:
        raise DimensionMismatchError(f"iterates have shapes {[v.shape for v in xs]}")
    x_km3, x_km2, x_km1, x_k = xs

    y_km2 = x_km2 - x_km3
    y_km1 = x_km1 - x_km3
    y_k   = x_k - x_km3
    if float(np.abs(y_k).sum()) < guard:
        return Extrapolation(None, None, "stationary input")

    gammas = gram_schmidt_solve(np.column_stack([y_km2, y_km1]), -y_k, guard)
    if gammas is None:
        return Extrapolation(None, None, "rank-deficient differences")

    coeffs = ExtrapolationCoeffs(*gammas)
    if abs(coeffs.beta_sum) < guard:
        return Extrapolation(None, coeffs, "vanishing coefficient sum")

    x_hat = (coeffs.beta0 * x_km2 + coeffs.beta1 * x_km1 + coeffs.beta2 * x_k) / coeffs.beta_sum
    return Extrapolation(proj(x_hat), coeffs)
