"""JSON state files.

Quantum: ``{"dims": [d1, ...], "matrix": [[re, im], ...]}`` with the D*D
entries flattened row-major. Classical: ``{"dims": [...], "classical":
[p, ...]}`` flattened row-major. Floats are written with ``repr`` so they
read back bit-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .operators import ClassicalState, DensityOperator, StateError

SCHEMA_VERSION = 1


def state_to_dict(state: DensityOperator | ClassicalState) -> dict:
    if isinstance(state, ClassicalState):
        return {"dims": list(state.dims), "classical": [float(x) for x in state.probs.ravel()]}
    flat = state.matrix.ravel()
    return {
        "dims": list(state.dims),
        "matrix": [[float(z.real), float(z.imag)] for z in flat],
    }


def state_from_dict(data: dict) -> DensityOperator | ClassicalState:
    try:
        dims = [int(d) for d in data["dims"]]
        if "classical" in data:
            return ClassicalState(dims, np.array(data["classical"], dtype=float))
        pairs = np.array(data["matrix"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise StateError(f"malformed state document: {exc}") from exc
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise StateError("matrix entries must be [re, im] pairs")
    side = int(round(pairs.shape[0] ** 0.5))
    if side * side != pairs.shape[0]:
        raise StateError(f"{pairs.shape[0]} matrix entries do not form a square")
    matrix = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(side, side)
    return DensityOperator(dims, matrix)


def load_state(path: str | Path) -> DensityOperator | ClassicalState:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise StateError(f"{path}: not valid JSON ({exc})") from exc
    return state_from_dict(data)


def dump_state(state, path: str | Path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state)) + "\n")
