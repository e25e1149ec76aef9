# =============================================================
#  markov/tensor_io.py – text / JSON tensor files
# =============================================================
"""
Two equivalent on-disk formats, both 1-based to match the usual notation.

Text
────
    order 3 dim 3
    1 1 1 0.6
    2 1 1 0.2
    ...
Blank lines and lines starting with ``#`` are ignored.  One nonzero per line:
m indices followed by the value.

JSON
────
    {"order": 3, "dim": 3, "entries": [[1, 1, 1, 0.6], ...]}

Values are written with 17 significant digits so that a write/read cycle
reproduces every float bit for bit.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np

from config.settings import FLOAT_FORMAT, STOCHASTIC_TOL
from markov.errors import StochasticityError, TensorStructureError
from markov.tensor import StochasticTensor, as_prob_vector, validate

_LOG = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _is_json(path: Path) -> bool:
    return path.suffix.lower() == ".json"


# ──────────────────────────────────────────────────────────────────────────────
# PARSING
# ──────────────────────────────────────────────────────────────────────────────
def parse_text(text: str, source: str = "<string>") -> Tuple[int, int, List[Tuple[Sequence[int], float]]]:
    """Return ``(order, dim, entries)`` from the text format."""
    order = dim = None
    entries: List[Tuple[Sequence[int], float]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue

        parts = line.split()
        if order is None:
            # header: "order m dim n"
            if len(parts) != 4 or parts[0].lower() != "order" or parts[2].lower() != "dim":
                raise TensorStructureError(
                    f"{source}:{lineno}: expected header 'order m dim n', got {line!r}")
            try:
                order, dim = int(parts[1]), int(parts[3])
            except ValueError:
                raise TensorStructureError(f"{source}:{lineno}: non-integer header {line!r}") from None
            continue

        if len(parts) != order + 1:
            raise TensorStructureError(
                f"{source}:{lineno}: expected {order} indices and a value, got {line!r}")
        try:
            idx = [int(p) for p in parts[:order]]
            val = float(parts[order])
        except ValueError:
            raise TensorStructureError(f"{source}:{lineno}: cannot parse {line!r}") from None
        if any(i < 1 or i > dim for i in idx):
            raise TensorStructureError(
                f"{source}:{lineno}: index {tuple(idx)} out of range 1..{dim}")
        entries.append((idx, val))

    if order is None:
        raise TensorStructureError(f"{source}: missing 'order m dim n' header")
    return order, dim, entries


def parse_json(text: str, source: str = "<string>") -> Tuple[int, int, List[Tuple[Sequence[int], float]]]:
    try:
        doc = json.loads(text)
        order, dim = int(doc["order"]), int(doc["dim"])
        raw_entries = doc["entries"]
    except (ValueError, KeyError, TypeError) as err:
        raise TensorStructureError(f"{source}: malformed tensor JSON ({err})") from None

    entries: List[Tuple[Sequence[int], float]] = []
    for k, row in enumerate(raw_entries):
        if not isinstance(row, list) or len(row) != order + 1:
            raise TensorStructureError(f"{source}: entry #{k} must list {order} indices and a value")
        idx = [int(i) for i in row[:order]]
        if any(i < 1 or i > dim for i in idx):
            raise TensorStructureError(f"{source}: entry #{k} index {tuple(idx)} out of range 1..{dim}")
        entries.append((idx, float(row[order])))
    return order, dim, entries


# ──────────────────────────────────────────────────────────────────────────────
# LOAD / SAVE
# ──────────────────────────────────────────────────────────────────────────────
def load_tensor(path: PathLike, repair: bool = False, check: bool = True,
                tol: float = STOCHASTIC_TOL) -> StochasticTensor:
    """Read a tensor file; with ``repair`` every column is renormalised first."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise OSError(f"cannot read tensor file {path}: {err}") from err

    parser = parse_json if _is_json(path) else parse_text
    order, dim, entries = parser(text, source=str(path))
    tensor = StochasticTensor.from_entries(order, dim, entries, check=False)

    if repair:
        tensor = tensor.repair()
    if check:
        result = validate(tensor, tol=tol)
        if not result.ok:
            raise StochasticityError(
                f"{path}: not a transition probability tensor: {result.describe()}"
                + ("" if repair else " (try --repair)"), result)
    _LOG.debug("loaded %s from %s", tensor, path)
    return tensor


def dumps_text(t: StochasticTensor) -> str:
    lines = [f"order {t.order} dim {t.dim}"]
    for idx, val in t.entries():
        lines.append(" ".join(str(i) for i in idx) + " " + FLOAT_FORMAT % val)
    return "\n".join(lines) + "\n"


def dumps_json(t: StochasticTensor) -> str:
    doc = {
        "order": t.order,
        "dim": t.dim,
        "entries": [[*idx, val] for idx, val in t.entries()],
    }
    return json.dumps(doc)


def save_tensor(t: StochasticTensor, path: PathLike) -> Path:
    path = Path(path)
    payload = dumps_json(t) if _is_json(path) else dumps_text(t)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(payload, encoding="utf-8")
    except OSError as err:
        raise OSError(f"cannot write tensor file {path}: {err}") from err
    return path


def load_vector(path: PathLike, n: int | None = None) -> np.ndarray:
    """Whitespace- or JSON-list vector file, validated as a ProbVector."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise OSError(f"cannot read vector file {path}: {err}") from err
    try:
        values = json.loads(text) if _is_json(path) else [float(tok) for tok in text.split()]
    except ValueError as err:
        raise TensorStructureError(f"{path}: cannot parse vector ({err})") from None
    return as_prob_vector(values, n=n)
