# =============================================================
#  bench/fixtures.py – the four DNA-sequence transition tensors
# =============================================================
"""
Fixtures (i)–(iv) as printed to four decimals, together with the
per-fixture method parameters and the reference (IT, RR) pairs.

Slices are written the MATLAB way: ``P(:,:,k)`` has rows i1 and columns i2,
and for the order-4 fixture ``P(:,:,k,l)`` fixes (i3, i4) = (k, l).

The reference RR digits coincide with the final stopping quantity
‖x_k − x_{k-1}‖₁ rather than ‖Px^{m-1} − x‖₁, so they are kept for display
only; acceptance compares IT and requires the recomputed residual ≤ 1e-10.

Fixture (iii) is printed inconsistently: column (1, 1) sums to 1.045 and in
slice 3 rows 3 and 4 are identical, so every column of that slice misses 1 by
up to 0.23.  Those columns are listed in ``known_defects``; the tensor is
repaired by renormalisation like the others but its reference counts are not
enforced.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np

from markov.tensor import StochasticTensor
from solvers.config import Method

_LOG = logging.getLogger(__name__)

FIXTURE_NAMES = ("i", "ii", "iii", "iv")
PRINT_TOL = 5e-4

# ── raw slices ──────────────────────────────────────────────────────────────
_SLICES_I = [
    [[.6000, .4083, .4935], [.2000, .2568, .2426], [.2000, .3349, .2639]],
    [[.5217, .3300, .4152], [.2232, .2800, .2658], [.2551, .3900, .3190]],
    [[.5565, .3648, .4500], [.2174, .2742, .2600], [.2261, .3610, .2900]],
]

_SLICES_II = [
    [[.5200, .2986, .4462], [.2700, .3930, .3192], [.2100, .3084, .2346]],
    [[.6514, .4300, .5776], [.1970, .3200, .2462], [.1516, .2500, .1762]],
    [[.5638, .3424, .4900], [.2408, .3638, .2900], [.1954, .2938, .2200]],
]

_SLICES_III = [
    [[.2091, .2834, .2194, .1830], [.3371, .3997, .3219, .3377],
     [.3265, .0560, .3119, .2961], [.1723, .2608, .1468, .1832]],
    [[.1952, .2695, .2055, .1690], [.3336, .3962, .3184, .3342],
     [.2954, .0249, .2808, .2650], [.1758, .3094, .1953, .2318]],
    [[.3145, .3887, .3248, .2883], [.0603, .1203, .0451, .0609],
     [.2293, .3628, .2487, .2852], [.2293, .3628, .2487, .2852]],
    [[.1685, .2429, .1789, .1425], [.3553, .4180, .3402, .3559],
     [.3189, .0484, .3043, .2885], [.1571, .2907, .1766, .2131]],
]

# keyed (k, l) for P(:,:,k,l)
_SLICES_IV = {
    (1, 1): [[.3721, .2600, .4157], [.4477, .5000, .4270], [.1802, .2400, .1573]],
    (2, 1): [[.3692, .2673, .3175], [.4667, .5594, .5079], [.1641, .1733, .1746]],
    (3, 1): [[.4227, .2958, .2353], [.4124, .5563, .5588], [.1649, .1479, .2059]],
    (1, 2): [[.3178, .2632, .3194], [.5212, .6228, .5833], [.1610, .1140, .0972]],
    (2, 2): [[.2836, .2636, .3042], [.5012, .6000, .5250], [.2152, .1364, .1708]],
    (3, 2): [[.3382, .2396, .3766], [.5147, .6406, .4935], [.1471, .1198, .1299]],
    (1, 3): [[.3204, .2985, .3500], [.4854, .5000, .5000], [.1942, .2015, .1500]],
    (2, 3): [[.4068, .2816, .3594], [.3898, .5143, .4219], [.2034, .2041, .2188]],
    (3, 3): [[.3721, .3529, .3000], [.5349, .3971, .5500], [.0930, .2500, .1500]],
}


def _stack3(slices) -> np.ndarray:
    return np.stack([np.asarray(s, dtype=float) for s in slices], axis=2)


def _stack4(slices: Mapping[Tuple[int, int], list]) -> np.ndarray:
    n = len(next(iter(slices.values())))
    out = np.zeros((n, n, n, n))
    for (k, l), s in slices.items():
        out[:, :, k - 1, l - 1] = s
    return out


# ── method parameters and reference values ─────────────────────────────────
_BETA = {"i": 0.045, "ii": 0.0045, "iii": 0.1, "iv": 0.03}
_ETA  = {"i": 0.2, "ii": 0.07, "iii": 0.1, "iv": 0.2}
_GAMMA = 1.2

# (IT, RR) per method
_EXPECTED: Dict[str, Dict[Method, Tuple[int, float]]] = {
    "i": {
        Method.HOPM: (15, 2.76e-11), Method.GEAP: (14, 9.06e-11), Method.RHOPM: (16, 2.90e-11),
        Method.HOPMM1: (9, 6.21e-11), Method.HOPMM2: (10, 3.82e-11), Method.QEHOPM: (5, 1.11e-16),
    },
    "ii": {
        Method.HOPM: (9, 6.58e-11), Method.GEAP: (9, 7.58e-12), Method.RHOPM: (15, 3.52e-11),
        Method.HOPMM1: (7, 9.24e-11), Method.HOPMM2: (6, 3.82e-11), Method.QEHOPM: (5, 5.55e-17),
    },
    "iii": {
        Method.HOPM: (21, 3.97e-11), Method.GEAP: (27, 5.98e-11), Method.RHOPM: (29, 9.08e-11),
        Method.HOPMM1: (17, 7.76e-11), Method.HOPMM2: (19, 3.82e-11), Method.QEHOPM: (13, 1.26e-12),
    },
    "iv": {
        Method.HOPM: (13, 3.42e-11), Method.GEAP: (12, 9.52e-11), Method.RHOPM: (16, 4.12e-11),
        Method.HOPMM1: (10, 8.25e-11), Method.HOPMM2: (9, 3.82e-11), Method.QEHOPM: (8, 3.95e-11),
    },
}

# columns (i2, i3) of fixture (iii) that miss 1 by more than the printing error
KNOWN_DEFECTS: Dict[str, List[Tuple[int, ...]]] = {
    "iii": [(1, 1), (1, 3), (2, 3), (3, 3), (4, 3)],
}

# (fixture, method) pairs whose reference IT is reported but not enforced
UNENFORCED: Dict[Tuple[str, Method], str] = {
    **{("iii", m): "fixture (iii) printed with inconsistent columns" for m in Method},
}


@dataclass(frozen=True, eq=False)
class Fixture:
    name: str
    raw: np.ndarray                     # as printed, before repair
    tensor: StochasticTensor            # column-renormalised
    params: Dict[Method, Dict[str, Any]]
    expected: Dict[Method, Tuple[int, float]]
    known_defects: List[Tuple[int, ...]] = field(default_factory=list)   # 1-based (i2, …, im)

    @property
    def order(self) -> int:
        return self.tensor.order

    @property
    def dim(self) -> int:
        return self.tensor.dim

    def enforced(self, method: Method) -> bool:
        return (self.name, method) not in UNENFORCED

    def raw_column_sums(self) -> np.ndarray:
        return self.raw.sum(axis=0)


def _params(name: str) -> Dict[Method, Dict[str, Any]]:
    # the reference GEAP counts come from λ_min of the unsymmetrised Hessian
    return {
        Method.HOPM: {},
        Method.GEAP: {"geap_hessian": "nonsym"},
        Method.RHOPM: {"gamma": _GAMMA},
        Method.HOPMM1: {"beta": _BETA[name]},
        Method.HOPMM2: {"eta": _ETA[name]},
        Method.QEHOPM: {},
    }


def _raw(name: str) -> np.ndarray:
    if name == "i":
        return _stack3(_SLICES_I)
    if name == "ii":
        return _stack3(_SLICES_II)
    if name == "iii":
        return _stack3(_SLICES_III)
    if name == "iv":
        return _stack4(_SLICES_IV)
    raise KeyError(f"unknown fixture {name!r}; expected one of {FIXTURE_NAMES}")


@lru_cache(maxsize=None)
def load_fixture(name: str) -> Fixture:
    raw = _raw(name)
    raw.setflags(write=False)
    defects = list(KNOWN_DEFECTS.get(name, []))
    if defects:
        _LOG.warning("fixture (%s): %d column(s) printed off by more than %.0e, renormalising",
                     name, len(defects), PRINT_TOL)
    tensor = StochasticTensor.from_dense(raw, check=False).repair()
    return Fixture(name, raw, tensor, _params(name), _EXPECTED[name], defects)


def all_fixtures() -> List[Fixture]:
    return [load_fixture(name) for name in FIXTURE_NAMES]


def default_params(name: Optional[str], method: Method) -> Dict[str, Any]:
    """Method parameters for a named fixture, {} when there is none."""
    if name is None:
        return {}
    return dict(load_fixture(name).params[method])


# ──────────────────────────────────────────────────────────────────────────────
# synthetic instances
# ──────────────────────────────────────────────────────────────────────────────
def cyclic_tensor(order: int = 3, dim: int = 3) -> StochasticTensor:
    """p = 1 exactly when i1 = i2 + 1 (mod n): the chain rotates its last state.

    Px^{m-1} = Πx on the simplex for the cyclic shift Π, so with strong damping
    the PageRank map has eigenvalues of modulus θ on the unit circle and the
    plain power method converges like θ^k.
    """
    subs = []
    for tail in np.ndindex(*(dim,) * (order - 1)):
        subs.append(((tail[0] + 1) % dim, *tail))
    return StochasticTensor.from_coo(order, dim, np.asarray(subs), np.ones(len(subs)))


STRESS_TELEPORT = (0.5, 0.3, 0.2)
STRESS_THETA = 0.99
