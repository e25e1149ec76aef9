# =============================================================
#  pagerank/generator.py – seeded random transition tensors
# =============================================================
from __future__ import annotations

import logging

import numpy as np

from markov.errors import TensorStructureError
from markov.tensor import StochasticTensor

_LOG = logging.getLogger(__name__)


def gen_random_tensor(
    order: int,
    dim: int,
    density: float,
    seed: int,
    uniform_blend: float = 0.0,
) -> StochasticTensor:
    """Random column-stochastic tensor, reproducible from ``seed``.

    Each (i2,…,im) column keeps every entry with probability ``density`` (at
    least one always survives), draws values uniformly from (0, 1] and is
    normalised.  With ``uniform_blend`` b > 0 the result is bU + (1−b)R for the
    uniform tensor U, which puts δ_m ≥ b.
    """
    if order < 2 or dim < 1:
        raise TensorStructureError(f"need order ≥ 2 and dim ≥ 1, got order={order}, dim={dim}")
    if not 0.0 < density <= 1.0:
        raise ValueError(f"density must lie in (0, 1], got {density}")
    if not 0.0 <= uniform_blend <= 1.0:
        raise ValueError(f"uniform_blend must lie in [0, 1], got {uniform_blend}")

    rng = np.random.default_rng(seed)
    tails = dim ** (order - 1)
    values = 1.0 - rng.random((dim, tails))          # (0, 1]
    keep = rng.random((dim, tails)) < density

    empty = np.flatnonzero(~keep.any(axis=0))
    if empty.size:
        keep[rng.integers(dim, size=empty.size), empty] = True

    cols = np.where(keep, values, 0.0)
    cols /= cols.sum(axis=0, keepdims=True)
    if uniform_blend > 0.0:
        cols = uniform_blend / dim + (1.0 - uniform_blend) * cols

    tensor = StochasticTensor.from_dense(cols.reshape((dim,) * order))
    _LOG.debug("generated %r (density=%.3g, seed=%d, blend=%.3g)", tensor, density, seed, uniform_blend)
    return tensor
