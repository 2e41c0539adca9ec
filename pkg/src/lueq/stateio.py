"""State file format and deterministic JSON output.

A state file is a single JSON document:

    {"n": 2, "kind": "pure",    "amplitudes": [[re, im], ...]}      (2**n pairs)
    {"n": 2, "kind": "density", "matrix": [[[re, im], ...], ...]}   (2**n rows)

Amplitudes must be normalized within 1e-10; density matrices must satisfy the
usual state invariants. Numbers are written with up to 17 significant digits,
which round-trips doubles exactly, so every emitted file re-parses to a
bit-identical matrix.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import InvalidStateError
from .pauli import MultiQubitState

__all__ = ["parse_state", "state_document", "pure_state_document", "dumps"]


def parse_state(text: str) -> MultiQubitState:
    """Parse a state file; raises ValueError / InvalidStateError on bad input."""
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise ValueError("state file must contain a JSON object")
    try:
        n = int(doc["n"])
        kind = doc["kind"]
    except KeyError as exc:
        raise ValueError(f"state file missing field {exc}") from exc
    if kind == "pure":
        pairs = doc.get("amplitudes")
        if pairs is None or len(pairs) != 2**n:
            raise ValueError(f"expected {2**n} amplitude pairs")
        psi = np.array([complex(re, im) for re, im in pairs])
        return MultiQubitState.from_vector(psi)
    if kind == "density":
        rows = doc.get("matrix")
        if rows is None or len(rows) != 2**n or any(len(r) != 2**n for r in rows):
            raise ValueError(f"expected a {2**n}x{2**n} matrix")
        m = np.array([[complex(re, im) for re, im in row] for row in rows])
        return MultiQubitState(m, n=n)
    raise ValueError(f"unknown state kind {kind!r}")


def state_document(state: MultiQubitState) -> dict:
    """Density-matrix document for a state."""
    return {
        "n": state.n,
        "kind": "density",
        "matrix": [[[float(x.real), float(x.imag)] for x in row] for row in state.matrix],
    }


def pure_state_document(n: int, amplitudes) -> dict:
    """Pure-state document from an amplitude vector."""
    psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise InvalidStateError("normalized", "amplitudes are not normalized")
    return {
        "n": n,
        "kind": "pure",
        "amplitudes": [[float(x.real), float(x.imag)] for x in psi],
    }


def _write(obj, out: list):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, float):
        if not np.isfinite(obj):
            raise ValueError(f"non-finite number {obj} cannot be serialized")
        out.append(f"{obj:.17g}")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for k, v in obj.items():
            if out[-1] not in ("{",):
                out.append(",")
            out.append(json.dumps(str(k)))
            out.append(":")
            _write(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for v in obj:
            if out[-1] not in ("[",):
                out.append(",")
            _write(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj)}")


def dumps(obj) -> str:
    """Compact JSON with 17-significant-digit floats; byte-deterministic."""
    out: list = []
    _write(obj, out)
    return "".join(out)
