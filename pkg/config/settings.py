# =============================================================
#  config/settings.py – tunable constants shared by every module
# =============================================================
"""
Numbers that the solvers, the loaders and the benchmark harness agree on.

Stopping rule and iteration cap follow the published experimental protocol
(uniform start, 1-norm step below 1e-10, at most 1000 contractions).
"""

# ── stopping rule ────────────────────────────────────────────────────────────
DEFAULT_TOL      = 1e-10
DEFAULT_MAX_ITER = 1000

# ── method parameters ───────────────────────────────────────────────────────
DEFAULT_GAMMA = 1.2         # RHOPM relaxation
DEFAULT_TAU   = 1e-6        # GEAP positive-definiteness tolerance

# acceleration cadence (every k-th contraction)
DEFAULT_PERIODS = {
    "hopmm1": 3,
    "hopmm2": 2,
    "qehopm": 4,
}

# ── numerical guards ────────────────────────────────────────────────────────
STOCHASTIC_TOL      = 1e-12     # column sums on load
MATRIX_COLUMN_TOL   = 1e-10     # Px^{m-2} column sums
EXTRAPOLATION_GUARD = 1e-13     # ‖y_k‖, Gram–Schmidt norms, |Σβ|
ITERATE_CHECK_TOL   = 1e-12     # debug-time simplex check on every iterate

# ── storage / size limits ───────────────────────────────────────────────────
DENSE_LIMIT        = 10 ** 6    # n^m at or below → dense array
MATRIX_PATH_ORDER  = 4          # apply via apply_matrix when m ≤ this …
MATRIX_PATH_DIM    = 64         # … and n ≤ this
CONDITION_MAX_DIM  = 20         # exact δ_m enumeration (2^n subsets)
CONDITION_MAX_TUPLES = 10 ** 6  # n^{m-1} column tuples
GEAP_MAX_DIM       = 512        # dense symmetric eigendecomposition

# ── file format ─────────────────────────────────────────────────────────────
FLOAT_FORMAT = "%.17g"

# ── benchmark protocol ──────────────────────────────────────────────────────
PAGERANK_THETAS   = (0.70, 0.85, 0.90, 0.95, 0.99)
PAGERANK_SEEDS    = tuple(range(29))
PAGERANK_ORDER    = 3
PAGERANK_DIM      = 6
PAGERANK_DENSITY  = 0.5
IT_TOLERANCE      = 2           # reference iteration-count acceptance
IT_TOLERANCE_GEAP = 4
RR_ACCEPT         = 1e-10
