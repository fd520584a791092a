"""Text documents for bases and certificates.

A basis document is JSON with ``format_version``, ``dims`` and ``states``;
each state lists one vector per party and each entry is ``[re, im]``.
Floats are written with 17 significant digits, enough to reload the exact
same doubles.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .basis import ProductBasis, ProductState, verify_pb
from .numerics import DEFAULT_TOL

FORMAT_VERSION = "1"


class DocumentError(ValueError):
    pass


def _num(x: float) -> str:
    return format(float(x), ".17g")


def _vector_text(v: np.ndarray) -> str:
    return "[" + ", ".join(f"[{_num(z.real)}, {_num(z.imag)}]" for z in v) + "]"


def state_text(s: ProductState) -> str:
    return "[" + ", ".join(_vector_text(v) for v in s.locals) + "]"


def state_json(s: ProductState) -> list:
    return json.loads(state_text(s))


def dumps_basis(pb: ProductBasis) -> str:
    states = ",\n    ".join(state_text(s) for s in pb.states)
    body = f"[\n    {states}\n  ]" if pb.states else "[]"
    return (
        "{\n"
        f'  "format_version": "{FORMAT_VERSION}",\n'
        f'  "dims": {json.dumps(list(pb.dims))},\n'
        f'  "states": {body}\n'
        "}\n"
    )


def _parse_vector(raw, d: int, where: str) -> np.ndarray:
    try:
        arr = np.array([complex(float(re), float(im)) for re, im in raw], dtype=complex)
    except (TypeError, ValueError):
        raise DocumentError(f"{where}: entries must be [re, im] pairs") from None
    if arr.shape != (d,):
        raise DocumentError(f"{where}: expected {d} entries, got {arr.shape[0]}")
    return arr


def state_from_json(raw, dims, where: str = "state") -> list[np.ndarray]:
    if not isinstance(raw, list) or len(raw) != len(dims):
        raise DocumentError(f"{where}: expected one vector per party ({len(dims)})")
    return [_parse_vector(v, d, f"{where}, party {i}") for i, (v, d) in enumerate(zip(raw, dims))]


def loads_basis(text: str, tol: float = DEFAULT_TOL) -> ProductBasis:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    if doc.get("format_version") != FORMAT_VERSION:
        raise DocumentError(f"unsupported format_version {doc.get('format_version')!r}")
    dims = doc.get("dims")
    if not isinstance(dims, list) or not dims or not all(isinstance(d, int) and d >= 1 for d in dims):
        raise DocumentError("dims must be a nonempty list of positive integers")
    states = doc.get("states")
    if not isinstance(states, list):
        raise DocumentError("states must be a list")
    raw = [state_from_json(s, dims, f"state {j}") for j, s in enumerate(states)]
    return verify_pb(dims, raw, tol)


def dump_basis(pb: ProductBasis, path) -> None:
    Path(path).write_text(dumps_basis(pb))


def load_basis(path, tol: float = DEFAULT_TOL) -> ProductBasis:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}") from None
    return loads_basis(text, tol)
