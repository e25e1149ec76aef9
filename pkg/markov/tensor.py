# =============================================================
#  markov/tensor.py – transition probability tensors & contractions
# =============================================================
"""
Storage, validation and contraction for order-m, dimension-n transition
probability tensors.

Index convention
────────────────
Axis 0 (i1) is the destination state; axes 1..m-1 (i2..im) are the
conditioning history.  For every fixed tail (i2,…,im) the entries over i1 sum
to one.  Everything here is 0-based; only the file formats (tensor_io) and
user-facing violation reports speak 1-based.

Storage
───────
Coordinate form (`subs`, `vals`) is canonical.  A dense n^m array is kept as
well whenever n^m ≤ DENSE_LIMIT; contractions use whichever path is cheaper and
both are required to agree.  Instances are immutable after construction.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import (
    DENSE_LIMIT,
    MATRIX_PATH_DIM,
    MATRIX_PATH_ORDER,
    STOCHASTIC_TOL,
)
from markov.errors import (
    DimensionMismatchError,
    NoPositiveMassError,
    StochasticityError,
    TensorStructureError,
)

_LOG = logging.getLogger(__name__)

# A ProbVector is a 1-D float array on the simplex; a ContractionMatrix is the
# n×n array Px^{m-2}.  Both are plain numpy arrays.
ProbVector = np.ndarray
ContractionMatrix = np.ndarray


# ──────────────────────────────────────────────────────────────────────────────
# VALIDATION RESULT
# ──────────────────────────────────────────────────────────────────────────────
@dataclass(frozen=True)
class ColumnViolation:
    column: Tuple[int, ...]     # 1-based (i2, …, im)
    total: float


@dataclass
class ValidationResult:
    violations: List[ColumnViolation] = field(default_factory=list)
    negative_entries: List[Tuple[Tuple[int, ...], float]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations and not self.negative_entries

    def describe(self, limit: int = 5) -> str:
        if self.ok:
            return "ok"
        parts: List[str] = []
        for v in self.violations[:limit]:
            parts.append(f"column {v.column} sums to {v.total:.17g}")
        for idx, val in self.negative_entries[:limit]:
            parts.append(f"entry {idx} is negative ({val:.6g})")
        hidden = len(self.violations) + len(self.negative_entries) - len(parts)
        if hidden > 0:
            parts.append(f"… and {hidden} more")
        return "; ".join(parts)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [{"column": list(v.column), "sum": v.total} for v in self.violations],
            "negative_entries": [{"index": list(i), "value": v} for i, v in self.negative_entries],
        }


# ──────────────────────────────────────────────────────────────────────────────
# TENSOR
# ──────────────────────────────────────────────────────────────────────────────
class StochasticTensor:
    """Immutable order-m, dimension-n nonnegative tensor, stochastic along axis 0."""

    def __init__(
        self,
        order: int,
        dim: int,
        subs: np.ndarray,
        vals: np.ndarray,
        check: bool = True,
        tol: float = STOCHASTIC_TOL,
    ):
        order, dim = int(order), int(dim)
        if order < 2:
            raise TensorStructureError(f"order must be ≥ 2, got {order}")
        if dim < 1:
            raise TensorStructureError(f"dim must be ≥ 1, got {dim}")

        subs = np.asarray(subs, dtype=np.int64).reshape(-1, order)
        vals = np.asarray(vals, dtype=float).ravel()
        if subs.shape[0] != vals.shape[0]:
            raise TensorStructureError(
                f"{subs.shape[0]} index tuples but {vals.shape[0]} values")
        if subs.size and (subs.min() < 0 or subs.max() >= dim):
            bad = subs[np.any((subs < 0) | (subs >= dim), axis=1)][0]
            raise TensorStructureError(
                f"index {tuple(int(i) + 1 for i in bad)} out of range for dim {dim}")
        if not np.all(np.isfinite(vals)):
            raise TensorStructureError("tensor entries must be finite")

        # collapse duplicates and drop explicit zeros
        if subs.shape[0]:
            lin = np.ravel_multi_index(subs.T, (dim,) * order)
            uniq, inverse = np.unique(lin, return_inverse=True)
            summed = np.bincount(inverse, weights=vals, minlength=uniq.size)
            keep = summed != 0.0
            uniq, summed = uniq[keep], summed[keep]
            subs = np.stack(np.unravel_index(uniq, (dim,) * order), axis=1).astype(np.int64)
            vals = summed

        self.order = order
        self.dim   = dim
        self.subs  = subs
        self.vals  = vals
        self.subs.flags.writeable = False
        self.vals.flags.writeable = False

        self._dense: Optional[np.ndarray] = None
        if dim ** order <= DENSE_LIMIT:
            dense = np.zeros((dim,) * order)
            if subs.shape[0]:
                dense[tuple(subs.T)] = vals
            dense.flags.writeable = False
            self._dense = dense

        if check:
            result = validate(self, tol=tol)
            if not result.ok:
                raise StochasticityError(
                    f"not a transition probability tensor: {result.describe()}", result)

    # ─────────────────────────────────────────────────────────────────────
    # constructors
    # ─────────────────────────────────────────────────────────────────────
    @classmethod
    def from_dense(cls, array, check: bool = True, tol: float = STOCHASTIC_TOL) -> "StochasticTensor":
        arr = np.asarray(array, dtype=float)
        if arr.ndim < 2 or len(set(arr.shape)) != 1:
            raise TensorStructureError(f"dense tensor must be cubical, got shape {arr.shape}")
        subs = np.argwhere(arr != 0.0)
        return cls(arr.ndim, arr.shape[0], subs, arr[tuple(subs.T)], check=check, tol=tol)

    @classmethod
    def from_coo(cls, order: int, dim: int, subs, vals, check: bool = True,
                 tol: float = STOCHASTIC_TOL) -> "StochasticTensor":
        """0-based coordinates; duplicates are summed."""
        return cls(order, dim, subs, vals, check=check, tol=tol)

    @classmethod
    def from_entries(
        cls,
        order: int,
        dim: int,
        entries: Iterable[Tuple[Sequence[int], float]],
        check: bool = True,
        tol: float = STOCHASTIC_TOL,
    ) -> "StochasticTensor":
        """Build from 1-based ``(indices, value)`` pairs (file / report convention)."""
        subs: List[Sequence[int]] = []
        vals: List[float] = []
        for idx, val in entries:
            if len(idx) != order:
                raise TensorStructureError(f"entry {tuple(idx)} has {len(idx)} indices, order is {order}")
            subs.append([int(i) - 1 for i in idx])
            vals.append(float(val))
        return cls(order, dim, np.array(subs, dtype=np.int64), np.array(vals), check=check, tol=tol)

    @classmethod
    def uniform(cls, order: int, dim: int) -> "StochasticTensor":
        return cls.from_dense(np.full((dim,) * order, 1.0 / dim))

    # ─────────────────────────────────────────────────────────────────────
    # accessors
    # ─────────────────────────────────────────────────────────────────────
    @property
    def nnz(self) -> int:
        return int(self.vals.shape[0])

    @property
    def is_dense(self) -> bool:
        return self._dense is not None

    def to_dense(self) -> np.ndarray:
        if self._dense is not None:
            return self._dense.copy()
        if self.dim ** self.order > DENSE_LIMIT:
            raise TensorStructureError(
                f"n^m = {self.dim ** self.order} exceeds the dense limit {DENSE_LIMIT}")
        dense = np.zeros((self.dim,) * self.order)
        dense[tuple(self.subs.T)] = self.vals
        return dense

    def entries(self) -> List[Tuple[Tuple[int, ...], float]]:
        """1-based ``(indices, value)`` pairs in lexicographic order."""
        return [(tuple(int(i) + 1 for i in s), float(v)) for s, v in zip(self.subs, self.vals)]

    def column_sums(self) -> np.ndarray:
        """Array of shape (n,)*(m-1): Σ_{i1} p_{i1 i2 … im}."""
        tail_shape = (self.dim,) * (self.order - 1)
        if self._dense is not None:
            return self._dense.sum(axis=0)
        if not self.nnz:
            return np.zeros(tail_shape)
        col = np.ravel_multi_index(self.subs[:, 1:].T, tail_shape)
        return np.bincount(col, weights=self.vals,
                           minlength=int(np.prod(tail_shape))).reshape(tail_shape)

    def repair(self) -> "StochasticTensor":
        """Copy with every nonzero column renormalised to sum 1."""
        sums = self.column_sums()
        scale = sums[tuple(self.subs[:, 1:].T)] if self.nnz else np.empty(0)
        vals = np.where(scale > 0, self.vals / np.where(scale > 0, scale, 1.0), self.vals)
        worst = float(np.max(np.abs(sums[sums > 0] - 1.0))) if np.any(sums > 0) else 0.0
        if worst > 0:
            _LOG.info("repairing tensor (m=%d, n=%d): worst column deviation %.3g",
                      self.order, self.dim, worst)
        return StochasticTensor(self.order, self.dim, self.subs, vals, check=False)

    def apply(self, x: ProbVector) -> ProbVector:
        return apply(self, x)

    def apply_matrix(self, x: ProbVector) -> ContractionMatrix:
        return apply_matrix(self, x)

    def __repr__(self) -> str:
        kind = "dense" if self.is_dense else "sparse"
        return f"StochasticTensor(order={self.order}, dim={self.dim}, nnz={self.nnz}, {kind})"


# ──────────────────────────────────────────────────────────────────────────────
# VALIDATION
# ──────────────────────────────────────────────────────────────────────────────
def validate(t: StochasticTensor, tol: float = STOCHASTIC_TOL) -> ValidationResult:
    """Check nonnegativity and unit column sums; report offending columns 1-based."""
    result = ValidationResult()

    neg = np.flatnonzero(t.vals < 0)
    for k in neg:
        result.negative_entries.append(
            (tuple(int(i) + 1 for i in t.subs[k]), float(t.vals[k])))

    sums = t.column_sums()
    bad = np.argwhere(np.abs(sums - 1.0) > tol)
    for col in bad:
        result.violations.append(
            ColumnViolation(tuple(int(i) + 1 for i in col), float(sums[tuple(col)])))
    return result


# ──────────────────────────────────────────────────────────────────────────────
# VECTORS
# ──────────────────────────────────────────────────────────────────────────────
def uniform_vector(n: int) -> ProbVector:
    return np.full(int(n), 1.0 / n)


def _check_dim(t: StochasticTensor, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != t.dim:
        raise DimensionMismatchError(f"vector of shape {x.shape} against tensor dim {t.dim}")
    return x


def as_prob_vector(values, n: Optional[int] = None, tol: float = STOCHASTIC_TOL) -> ProbVector:
    """Validate and return ``values`` as a float ProbVector."""
    x = np.array(values, dtype=float).ravel()
    if n is not None and x.shape[0] != n:
        raise DimensionMismatchError(f"expected length {n}, got {x.shape[0]}")
    if x.size == 0:
        raise DimensionMismatchError("empty probability vector")
    if np.any(x < 0) or abs(float(x.sum()) - 1.0) > tol:
        raise StochasticityError(
            f"not a probability vector (min {x.min():.3g}, sum {x.sum():.17g})")
    return x


def proj(x) -> ProbVector:
    """Clamp to the nonnegative orthant and rescale to unit 1-norm."""
    xp = np.maximum(np.asarray(x, dtype=float), 0.0)
    mass = float(xp.sum())
    if not mass > 0.0:
        raise NoPositiveMassError("no positive mass")
    return xp / mass


# ──────────────────────────────────────────────────────────────────────────────
# CONTRACTIONS
# ──────────────────────────────────────────────────────────────────────────────
def apply_matrix(t: StochasticTensor, x: ProbVector) -> ContractionMatrix:
    """Px^{m-2}: entry (i1, i2) = Σ p_{i1 i2 i3 … im} x_{i3} … x_{im}."""
    x = _check_dim(t, x)
    n = t.dim
    if t._dense is not None:
        out = t._dense
        for _ in range(t.order - 2):
            out = out @ x
        return np.array(out, dtype=float)

    w = t.vals.copy()
    for axis in range(2, t.order):
        w *= x[t.subs[:, axis]]
    lin = t.subs[:, 0] * n + t.subs[:, 1]
    return np.bincount(lin, weights=w, minlength=n * n).reshape(n, n)


def _apply_sparse(t: StochasticTensor, x: np.ndarray) -> np.ndarray:
    w = t.vals.copy()
    for axis in range(1, t.order):
        w *= x[t.subs[:, axis]]
    return np.bincount(t.subs[:, 0], weights=w, minlength=t.dim)


def apply(t: StochasticTensor, x: ProbVector) -> ProbVector:
    """Px^{m-1}: entry i = Σ p_{i i2 … im} x_{i2} … x_{im}."""
    x = _check_dim(t, x)
    if t.is_dense and t.order <= MATRIX_PATH_ORDER and t.dim <= MATRIX_PATH_DIM:
        return apply_matrix(t, x) @ x
    return _apply_sparse(t, x)


def residual(t, x: ProbVector, ord: int = 1) -> float:
    """‖Px^{m-1} − x‖ (1-norm; ord=2 for diagnostics)."""
    x = np.asarray(x, dtype=float)
    return float(np.linalg.norm(t.apply(x) - x, ord=ord))


# ──────────────────────────────────────────────────────────────────────────────
# DIAGNOSTICS
# ──────────────────────────────────────────────────────────────────────────────
def z_eigen_residual(t: StochasticTensor, x: ProbVector) -> Tuple[float, float]:
    """(λ, ‖Px^{m-1} − λx‖₁) for a 1-normalised x; λ = 1ᵀPx^{m-1}."""
    x = _check_dim(t, x)
    x = x / np.abs(x).sum()
    y = apply(t, x)
    lam = float(y.sum())
    return lam, float(np.abs(y - lam * x).sum())


def z1_to_z2(x: np.ndarray, lam: float, order: int) -> Tuple[np.ndarray, float]:
    """Map a Z₁-eigenpair (‖x‖₁ = 1) to the corresponding Z₂-eigenpair.

    Rescaling x by 1/c scales Px^{m-1} by c^{-(m-1)}, so the eigenvalue picks
    up c^{-(m-2)}: the pair returned is (x/‖x‖₂, λ/‖x‖₂^{m-2}). The often
    quoted exponent m-1 does not satisfy Px^{m-1} = λx.
    """
    x = np.asarray(x, dtype=float)
    norm2 = float(np.linalg.norm(x))
    return x / norm2, lam / norm2 ** (order - 2)


def objective(t: StochasticTensor, x: ProbVector) -> float:
    """½xᵀx − (1/m)·xᵀ(Px^{m-2})x.

    For a symmetric P its gradient is x − Px^{m-1}; `gradient` uses that form
    for every P, which makes a unit descent step one HOPM iteration.
    """
    x = _check_dim(t, x)
    return float(0.5 * x @ x - (x @ apply_matrix(t, x) @ x) / t.order)


def gradient(t: StochasticTensor, x: ProbVector) -> np.ndarray:
    """x − Px^{m-1}; a unit step along −gradient is one HOPM iteration."""
    x = _check_dim(t, x)
    return x - apply(t, x)
