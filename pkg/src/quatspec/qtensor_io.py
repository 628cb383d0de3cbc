"""JSON file format for quaternion tensors.

A file holds ``shape`` (list of ints), four flat row-major component arrays
``w``, ``x``, ``y``, ``z`` and an optional ``support`` (the original spatial
footprint of a padded filter). Floats are written with 17 significant
digits so a read/write/read cycle is value-identical.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ShapeMismatchError
from .quat_linalg import QTensor

__all__ = ["QTensorFile", "QTensorParseError", "loads", "dumps", "load", "dump"]

_COMPONENTS = ("w", "x", "y", "z")


class QTensorParseError(ValueError):
    """Malformed quaternion tensor document."""


@dataclass(frozen=True)
class QTensorFile:
    tensor: QTensor
    support: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.support is not None:
            support = tuple(int(s) for s in self.support)
            if len(support) != self.tensor.ndim or any(
                s < 1 or s > n for s, n in zip(support, self.tensor.shape)
            ):
                raise ShapeMismatchError(f"support {support} does not fit shape {self.tensor.shape}")
            object.__setattr__(self, "support", support)


def _fmt(v: float) -> str:
    if not math.isfinite(v):
        raise ValueError("non-finite values cannot be serialized")
    if v == 0.0 and math.copysign(1.0, v) < 0.0:
        # "-0" would read back as the integer 0 and lose the sign
        return "-0.0"
    return format(float(v), ".17g")


def dumps(doc: QTensorFile | QTensor) -> str:
    if isinstance(doc, QTensor):
        doc = QTensorFile(doc)
    t = doc.tensor
    lines = ["{", f'  "shape": [{", ".join(str(int(s)) for s in t.shape)}],']
    flat = t.data.reshape(-1, 4)
    for c, name in enumerate(_COMPONENTS):
        values = ", ".join(_fmt(v) for v in flat[:, c])
        sep = "," if (c < 3 or doc.support is not None) else ""
        lines.append(f'  "{name}": [{values}]{sep}')
    if doc.support is not None:
        lines.append(f'  "support": [{", ".join(str(s) for s in doc.support)}]')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _int_list(value, key: str) -> tuple[int, ...]:
    if not isinstance(value, list) or not value:
        raise QTensorParseError(f'"{key}" must be a non-empty list of integers')
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise QTensorParseError(f'"{key}" entries must be positive integers, got {v!r}')
        out.append(v)
    return tuple(out)


def _reject_constant(token: str):
    raise QTensorParseError(f"non-finite number {token} not allowed")


def loads(text: str) -> QTensorFile:
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise QTensorParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise QTensorParseError("top level must be an object")
    missing = [k for k in ("shape",) + _COMPONENTS if k not in doc]
    if missing:
        raise QTensorParseError(f"missing keys: {', '.join(missing)}")
    shape = _int_list(doc["shape"], "shape")
    count = math.prod(shape)
    arrays = []
    for name in _COMPONENTS:
        arr = doc[name]
        if not isinstance(arr, list) or len(arr) != count:
            raise QTensorParseError(f'"{name}" must be a list of {count} numbers')
        if any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in arr):
            raise QTensorParseError(f'"{name}" must contain only numbers')
        arrays.append(np.asarray(arr, dtype=float))
    data = np.stack(arrays, axis=-1).reshape(shape + (4,))
    support = None
    if doc.get("support") is not None:
        support = _int_list(doc["support"], "support")
    try:
        return QTensorFile(QTensor(data), support)
    except ShapeMismatchError as exc:
        raise QTensorParseError(str(exc)) from exc


def load(path: str | Path) -> QTensorFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise QTensorParseError(f"cannot read {path}: {exc}") from exc
    return loads(text)


def dump(doc: QTensorFile | QTensor, path: str | Path) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")
