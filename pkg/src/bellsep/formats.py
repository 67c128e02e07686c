"""JSON readers and writers for states, POVM families, tables and weights.

Complex entries are ``[re, im]`` pairs (plain numbers are accepted as real);
matrices are row-major nested lists. Setting pairs are keyed ``"x:y"`` and
POVM effects ``"x:y:a:b"`` with 1-based outcome labels.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .general_model import CorrelationTable, FiniteLhvModel
from .quantum_core import DensityOperator, PovmFamily, ValidationError


def _load(src) -> dict:
    if isinstance(src, (str, Path)):
        with open(src) as fh:
            return json.load(fh)
    return src


def decode_matrix(data) -> np.ndarray:
    rows = []
    for row in data:
        out = []
        for v in row:
            if isinstance(v, (list, tuple)):
                if len(v) != 2:
                    raise ValidationError(f"complex entry must be [re, im], got {v!r}")
                out.append(complex(float(v[0]), float(v[1])))
            else:
                out.append(complex(float(v)))
        rows.append(out)
    m = np.array(rows, dtype=complex)
    if m.ndim != 2:
        raise ValidationError("matrix rows have inconsistent lengths")
    return m


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def _split_key(key: str, parts: int) -> tuple:
    fields = key.split(":")
    if len(fields) != parts:
        raise ValidationError(f"key {key!r} should have {parts} ':'-separated fields")
    return tuple(fields)


def read_state(src) -> DensityOperator:
    data = _load(src)
    if isinstance(data, dict):
        data = data["matrix"]
    return DensityOperator(decode_matrix(data))


def state_to_json(rho: DensityOperator) -> dict:
    return {"matrix": encode_matrix(rho.matrix)}


def read_povm(src) -> PovmFamily:
    data = _load(src)
    settings = [tuple(str(v) for v in s) for s in data["settings"]]
    effects = {}
    for key, mat in data["effects"].items():
        x, y, a, b = _split_key(key, 4)
        effects[(x, y, int(a), int(b))] = decode_matrix(mat)
    return PovmFamily(int(data["d1"]), int(data["d2"]), tuple(settings), effects)


def povm_to_json(povms: PovmFamily) -> dict:
    return {
        "d1": povms.d1,
        "d2": povms.d2,
        "settings": [list(s) for s in povms.settings],
        "effects": {f"{x}:{y}:{a}:{b}": encode_matrix(e.matrix) for (x, y, a, b), e in povms.effects.items()},
    }


def read_table(src) -> CorrelationTable:
    data = _load(src)
    settings = [tuple(str(v) for v in s) for s in data["settings"]]
    probs = {}
    for key, mat in data["probs"].items():
        probs[_split_key(key, 2)] = np.asarray(mat, dtype=float)
    return CorrelationTable(tuple(settings), tuple(data["outcomes"]), probs)


def table_to_json(table: CorrelationTable) -> dict:
    return {
        "settings": [list(s) for s in table.settings],
        "outcomes": list(table.outcomes),
        "probs": {f"{x}:{y}": table[(x, y)].tolist() for x, y in table.settings},
    }


def _lambda_label(v):
    return tuple(v) if isinstance(v, list) else v


def read_model(src) -> FiniteLhvModel:
    """Inverse of :meth:`FiniteLhvModel.to_dict`."""
    data = _load(src)
    settings = [tuple(str(v) for v in s) for s in data["settings"]]
    lam = [_lambda_label(v) for v in data["lambda_domain"]]
    w = [data["weights"][f"{x}:{y}"] for x, y in settings]
    rule = [data["outcome_rule"][f"{x}:{y}"] for x, y in settings]
    return FiniteLhvModel(tuple(lam), tuple(settings), w, rule, tuple(data.get("outcomes", (2, 2))), data.get("preparation", "P"))


def read_weights(src) -> tuple[dict, dict]:
    """Weight table for causal decomposition.

    Format: ``{"lambda_domain": [...], "settings": [["x","y"], ...],
    "weights": {"x:y": [p(lambda|x,y) per lambda]}, "p_xy": {"x:y": p}}``.
    Returns ``(weights, p_xy)`` with ``weights[(lambda, x, y)]``.
    """
    data = _load(src)
    lam = [_lambda_label(v) for v in data["lambda_domain"]]
    settings = [tuple(str(v) for v in s) for s in data["settings"]]
    weights = {}
    for x, y in settings:
        row = data["weights"][f"{x}:{y}"]
        if len(row) != len(lam):
            raise ValidationError(f"weights for {x}:{y} have {len(row)} entries, expected {len(lam)}")
        s = float(np.sum(row))
        if abs(s - 1.0) > 1e-10 or min(row) < 0:
            raise ValidationError(f"weights for {x}:{y} are not a probability distribution")
        for l, v in zip(lam, row):
            weights[(l, x, y)] = float(v)
    p_xy = {_split_key(k, 2): float(v) for k, v in data["p_xy"].items()}
    return weights, p_xy
