"""JSON documents for structures, states, operators and channels.

Complex scalars are ``[re, im]`` pairs (plain numbers are read as real);
matrices are row-major nested lists.  Document shapes::

    {"groups": [[0, 1], [2, 3]]}                  block structure
    {"amplitudes": [[0.6, 0], [0, 0.8]]}          pure state
    {"density": [[...], ...]}                     density matrix
    {"matrix": [[...], ...]}                      operator / unitary
    {"kraus": [[[...]], ...]}                     channel

Errors are raised as :class:`SchemaViolation` with a JSON pointer to the
offending node.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .channels import KrausChannel, completeness_residual
from .core import BlockStructure, decompose, make_block_structure
from .errors import BlockCoherenceError, SchemaViolation

CPTP_TOL = 1e-9


def _scalar(node, ptr: str) -> complex:
    if isinstance(node, bool):
        raise SchemaViolation(ptr, "expected a number or [re, im], got a boolean")
    if isinstance(node, (int, float)):
        val = complex(node)
    elif isinstance(node, list) and len(node) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in node
    ):
        val = complex(node[0], node[1])
    else:
        raise SchemaViolation(ptr, f"expected a number or [re, im], got {json.dumps(node)[:40]}")
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        raise SchemaViolation(ptr, "non-finite value")
    return val


def parse_vector(node, ptr: str = "") -> np.ndarray:
    if not isinstance(node, list) or not node:
        raise SchemaViolation(ptr, "expected a non-empty array of scalars")
    return np.array([_scalar(v, f"{ptr}/{i}") for i, v in enumerate(node)], dtype=complex)


def parse_matrix(node, ptr: str = "") -> np.ndarray:
    if not isinstance(node, list) or not node or not all(isinstance(r, list) for r in node):
        raise SchemaViolation(ptr, "expected a non-empty array of rows")
    rows = [parse_vector(r, f"{ptr}/{i}") for i, r in enumerate(node)]
    width = rows[0].size
    for i, r in enumerate(rows):
        if r.size != width:
            raise SchemaViolation(f"{ptr}/{i}", f"row has {r.size} entries, expected {width}")
    return np.array(rows)


def encode_scalar(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def encode_vector(v) -> list:
    return [encode_scalar(z) for z in np.asarray(v).reshape(-1)]


def encode_matrix(m) -> list:
    return [encode_vector(r) for r in np.asarray(m)]


def _require(doc, key: str):
    if not isinstance(doc, dict):
        raise SchemaViolation("", "expected a JSON object")
    if key not in doc:
        raise SchemaViolation("", f"missing key {key!r}")
    return doc[key]


# --------------------------------------------------------------------------
# document <-> objects


def structure_from_doc(doc) -> BlockStructure:
    groups = _require(doc, "groups")
    if not isinstance(groups, list) or not all(isinstance(g, list) for g in groups):
        raise SchemaViolation("/groups", "expected an array of index arrays")
    for mu, g in enumerate(groups):
        for i, v in enumerate(g):
            if isinstance(v, bool) or not isinstance(v, int):
                raise SchemaViolation(f"/groups/{mu}/{i}", "index must be an integer")
    d = doc.get("d")
    try:
        return make_block_structure(groups, d)
    except BlockCoherenceError as exc:
        raise SchemaViolation("/groups", str(exc)) from exc


def structure_to_doc(s: BlockStructure) -> dict:
    return {"groups": [list(g) for g in s.groups]}


def state_from_doc(doc, s: BlockStructure | None = None):
    amps = parse_vector(_require(doc, "amplitudes"), "/amplitudes")
    if s is None:
        s = make_block_structure([range(amps.size)])
    try:
        return decompose(amps, s)
    except BlockCoherenceError as exc:
        raise SchemaViolation("/amplitudes", str(exc)) from exc


def state_to_doc(v) -> dict:
    v = getattr(v, "amplitudes", v)
    return {"amplitudes": encode_vector(v)}


def density_from_doc(doc) -> np.ndarray:
    return parse_matrix(_require(doc, "density"), "/density")


def matrix_from_doc(doc) -> np.ndarray:
    return parse_matrix(_require(doc, "matrix"), "/matrix")


def channel_from_doc(doc, s: BlockStructure | None = None, tol: float = CPTP_TOL) -> KrausChannel:
    ks = _require(doc, "kraus")
    if not isinstance(ks, list) or not ks:
        raise SchemaViolation("/kraus", "expected a non-empty array of matrices")
    mats = [parse_matrix(k, f"/kraus/{a}") for a, k in enumerate(ks)]
    for a, k in enumerate(mats):
        if k.shape != mats[0].shape:
            raise SchemaViolation(f"/kraus/{a}", f"shape {k.shape} differs from {mats[0].shape}")
    if s is None:
        s = make_block_structure([range(mats[0].shape[1])])
    try:
        ch = KrausChannel(tuple(mats), s, None if mats[0].shape[0] == s.total_dim else
                          make_block_structure([range(mats[0].shape[0])]))
    except BlockCoherenceError as exc:
        raise SchemaViolation("/kraus", str(exc)) from exc
    res = completeness_residual(ch)
    if res > tol:
        raise SchemaViolation("/kraus", f"sum K^dag K != I (completeness residual {res:.3g})")
    return ch


def channel_to_doc(ch: KrausChannel) -> dict:
    return {"kraus": [encode_matrix(k) for k in ch.kraus]}


# --------------------------------------------------------------------------
# files


def load(path) -> dict:
    """Read a JSON document; :class:`json.JSONDecodeError` carries line and column."""
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def save(path, doc) -> None:
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def load_structure(path) -> BlockStructure:
    return structure_from_doc(load(path))


def load_state(path, s: BlockStructure | None = None):
    return state_from_doc(load(path), s)


def load_channel(path, s: BlockStructure | None = None) -> KrausChannel:
    return channel_from_doc(load(path), s)
