"""JSON file formats for states and measurement sets."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InputError
from .linalg import BipartiteState
from .measurements import MeasurementAssembly, _complex_matrix, assembly_from_json, assembly_to_json, complex_to_json
from .steering import isotropic_state, pure_state

__all__ = [
    "load_json",
    "load_assembly",
    "load_state",
    "state_from_json",
    "state_to_json",
    "assembly_from_json",
    "assembly_to_json",
    "dump_json",
]

_STATE_KEYS = {
    "isotropic": {"kind", "d", "eta"},
    "pure": {"kind", "gamma"},
    "matrix": {"kind", "d", "entries"},
}


def load_json(path) -> object:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc


def dump_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def _number(obj, key):
    val = obj.get(key)
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise InputError(f"state field {key!r} must be a number")
    return val


def state_from_json(obj) -> BipartiteState:
    """Parse ``{"kind": "isotropic"|"pure"|"matrix", ...}``.

    ``isotropic`` needs ``d`` and ``eta``; ``pure`` needs ``gamma`` (two
    qubits); ``matrix`` needs the local dimension ``d`` and a row-major
    ``d^2 x d^2`` ``entries`` matrix of ``[re, im]`` pairs.
    """
    if not isinstance(obj, dict):
        raise InputError("state file must hold a JSON object")
    kind = obj.get("kind")
    if kind not in _STATE_KEYS:
        raise InputError(f"state kind must be one of {sorted(_STATE_KEYS)}, got {kind!r}")
    allowed = _STATE_KEYS[kind]
    extra = set(obj) - allowed
    if extra:
        raise InputError(f"unknown keys for {kind} state: {sorted(extra)}")
    missing = allowed - set(obj)
    if missing:
        raise InputError(f"{kind} state is missing {sorted(missing)}")
    if kind == "pure":
        return pure_state(float(_number(obj, "gamma")))
    d = obj["d"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 2:
        raise InputError(f"'d' must be an integer >= 2, got {d!r}")
    if kind == "isotropic":
        return isotropic_state(d, float(_number(obj, "eta")))
    return BipartiteState(_complex_matrix(obj["entries"], d * d, "state entries"), (d, d))


def state_to_json(w: BipartiteState) -> dict:
    if w.dims[0] != w.dims[1]:
        raise InputError("the state schema stores equal local dimensions only")
    return {"kind": "matrix", "d": w.dims[0], "entries": complex_to_json(w.matrix)}


def load_state(path) -> BipartiteState:
    return state_from_json(load_json(path))


def load_assembly(path) -> MeasurementAssembly:
    return assembly_from_json(load_json(path))


def as_plain(obj):
    """Recursively convert numpy scalars/arrays for ``json.dumps``."""
    if isinstance(obj, dict):
        return {k: as_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [as_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return as_plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj
