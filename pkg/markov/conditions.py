# =============================================================
#  markov/conditions.py – δ_m, η_m and the uniqueness / rate gates
# =============================================================
"""
Structural quantities that decide whether the stationary vector is unique and
how fast the (accelerated) power iterations contract.

    δ_m = min_S { min_{i2..im} Σ_{i∈S'} p_{i i2..im} + min_{i2..im} Σ_{i∈S} p_{i i2..im} }
    η_m = (1 − δ_m)(m − 1)

over nonempty proper subsets S of the states (S' its complement).  The bracket
is symmetric under S ↔ S', so only subsets containing state 0 are enumerated.
δ_m > (m−2)/(m−1) ⇔ η_m < 1 ⇔ unique fixed point and ‖P(x^{m-1}−y^{m-1})‖₁ ≤
η_m‖x−y‖₁ on the simplex.

HOPMM-II rate bound
───────────────────
The heavy-ball contraction ε = (η + 1)η_m + η is below one exactly when
0 < η < (1−η_m)/(1+η_m); that is `hopmm2_eta_max` and what the solvers and
tests use.  The δ_m form (1−δ_m)/(1+δ_m) is a different quantity and is
kept as `hopmm2_eta_max_stated` for reference only.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Iterator, Sequence

import numpy as np
from scipy import sparse

from config.settings import CONDITION_MAX_DIM, CONDITION_MAX_TUPLES
from markov.errors import ConditionSizeError
from markov.tensor import StochasticTensor

_LOG = logging.getLogger(__name__)

_CHUNK_CELLS = 2 ** 22      # subsets × tails per block


@dataclass(frozen=True)
class ConditionReport:
    delta_m: float
    eta_m: float
    uniqueness_holds: bool
    hopmm2_eta_max: float
    hopmm1_beta_max: float
    hopmm2_eta_max_stated: float
    irreducible: bool
    order: int
    dim: int

    def to_dict(self) -> dict:
        return asdict(self)


# ──────────────────────────────────────────────────────────────────────────────
# helpers
# ──────────────────────────────────────────────────────────────────────────────
def _guard(t: StochasticTensor) -> None:
    tuples = t.dim ** (t.order - 1)
    if t.dim > CONDITION_MAX_DIM or tuples > CONDITION_MAX_TUPLES:
        raise ConditionSizeError(
            f"too large for exact δ_m: n={t.dim} (limit {CONDITION_MAX_DIM}), "
            f"n^(m-1)={tuples} (limit {CONDITION_MAX_TUPLES})")


def _unfolding(t: StochasticTensor) -> sparse.csr_matrix:
    """n × n^{m-1} matrix whose column c holds the distribution p_{·, tail(c)}."""
    tails = t.dim ** (t.order - 1)
    if t.nnz:
        col = np.ravel_multi_index(t.subs[:, 1:].T, (t.dim,) * (t.order - 1))
    else:
        col = np.empty(0, dtype=np.int64)
    return sparse.coo_matrix((t.vals, (t.subs[:, 0], col)), shape=(t.dim, tails)).tocsr()


def _half_subsets(n: int, tails: int = 1) -> Iterator[np.ndarray]:
    """Boolean membership rows of every nonempty proper subset containing state 0."""
    if n < 2:
        return
    free = n - 1
    step = max(1, _CHUNK_CELLS // tails)
    # masks over states 1..n-1; the all-ones mask would make S the full set
    codes = np.arange(2 ** free - 1, dtype=np.int64)
    bits = np.arange(free, dtype=np.int64)
    for start in range(0, codes.size, step):
        chunk = codes[start:start + step]
        rest = ((chunk[:, None] >> bits[None, :]) & 1).astype(bool)
        yield np.hstack([np.ones((chunk.size, 1), dtype=bool), rest])


# ──────────────────────────────────────────────────────────────────────────────
# δ_m
# ──────────────────────────────────────────────────────────────────────────────
def delta_m(t: StochasticTensor) -> float:
    """Exact δ_m by subset × column enumeration (n ≤ 20)."""
    _guard(t)
    if t.dim < 2:
        # no proper subset exists; a one-state chain is trivially unique
        return 1.0

    unfold_t = _unfolding(t).T.tocsr()      # tails × n
    best = np.inf
    for members in _half_subsets(t.dim, unfold_t.shape[0]):
        inside  = np.asarray(unfold_t @ members.T.astype(float)).T     # subsets × tails
        outside = np.asarray(unfold_t @ (~members).T.astype(float)).T
        bracket = outside.min(axis=1) + inside.min(axis=1)
        best = min(best, float(bracket.min()))
    _LOG.debug("δ_m = %.17g for %r", best, t)
    return best


def eta_m(delta: float, order: int) -> float:
    return (1.0 - delta) * (order - 1)


def _closed_off(unfold_t: sparse.csr_matrix, tail_states: np.ndarray, members: np.ndarray) -> np.ndarray:
    """Per subset I: True when no tail lying wholly outside I sends mass into I."""
    mass_in = np.asarray(unfold_t @ members.T.astype(float)).T           # subsets × tails
    touches = np.zeros(mass_in.shape, dtype=bool)
    for axis in range(tail_states.shape[1]):
        touches |= members[:, tail_states[:, axis]]
    leak = np.where(touches, 0.0, mass_in).sum(axis=1)
    return leak <= 0.0


def is_irreducible(t: StochasticTensor) -> bool:
    """False iff some nonempty proper I has p = 0 for all i1 ∈ I and i2..im ∉ I."""
    _guard(t)
    n, m = t.dim, t.order
    if n < 2:
        return True
    unfold_t = _unfolding(t).T.tocsr()
    tails = unfold_t.shape[0]
    tail_states = np.stack(np.unravel_index(np.arange(tails), (n,) * (m - 1)), axis=1)
    for members in _half_subsets(n, tails):
        if np.any(_closed_off(unfold_t, tail_states, members)) or \
           np.any(_closed_off(unfold_t, tail_states, ~members)):
            return False
    return True


# ──────────────────────────────────────────────────────────────────────────────
# report & rate factors
# ──────────────────────────────────────────────────────────────────────────────
def condition_report(t: StochasticTensor) -> ConditionReport:
    d = delta_m(t)
    e = eta_m(d, t.order)
    return ConditionReport(
        delta_m=d,
        eta_m=e,
        uniqueness_holds=bool(d > (t.order - 2) / (t.order - 1)),
        hopmm2_eta_max=(1.0 - e) / (1.0 + e) if e < 1.0 else 0.0,
        hopmm1_beta_max=1.0 - e if e < 1.0 else 0.0,
        hopmm2_eta_max_stated=(1.0 - d) / (1.0 + d),
        irreducible=is_irreducible(t),
        order=t.order,
        dim=t.dim,
    )


def contraction_factor_hopmm1(beta: float, eta: float) -> float:
    """Two-step factor (η_m + β)η_m + β of the momentum iteration."""
    return (eta + beta) * eta + beta


def contraction_factor_hopmm2(eta_momentum: float, eta: float) -> float:
    """Per-step factor ε = (η + 1)η_m + η of the heavy-ball iteration."""
    return (eta_momentum + 1.0) * eta + eta_momentum


def qe_contraction_factor(alphas: Sequence[float], eta: float) -> float:
    """Two-step factor (α1η_m + α2)η_m + α3 of an extrapolation event."""
    a1, a2, a3 = alphas
    return (a1 * eta + a2) * eta + a3
