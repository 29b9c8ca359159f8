"""Matrix JSON files: ``{"rows": n, "cols": m, "data": [[[re, im], ...], ...]}``.

Entries may be abbreviated to bare real numbers on input.  Output always uses
``[re, im]`` pairs; Python's float repr makes the round trip bit-exact.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .linalg_core import LinalgError


class MatrixFormatError(LinalgError):
    pass


def _entry(value, i, j):
    if isinstance(value, bool):
        raise MatrixFormatError(f"entry ({i}, {j}): booleans are not numbers")
    if isinstance(value, (int, float)):
        re, im = float(value), 0.0
    elif isinstance(value, list) and len(value) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        re, im = float(value[0]), float(value[1])
    else:
        raise MatrixFormatError(f"entry ({i}, {j}): expected a number or [re, im], got {value!r}")
    if not (math.isfinite(re) and math.isfinite(im)):
        raise MatrixFormatError(f"entry ({i}, {j}): non-finite value")
    return complex(re, im)


def matrix_from_obj(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise MatrixFormatError("top level must be an object")
    for key in ("rows", "cols", "data"):
        if key not in obj:
            raise MatrixFormatError(f"missing key {key!r}")
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    if not (isinstance(rows, int) and isinstance(cols, int) and rows > 0 and cols > 0):
        raise MatrixFormatError("rows and cols must be positive integers")
    if not isinstance(data, list) or len(data) != rows:
        raise MatrixFormatError(f"data must hold {rows} rows, found "
                                f"{len(data) if isinstance(data, list) else type(data).__name__}")
    out = np.empty((rows, cols), dtype=complex)
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            found = len(row) if isinstance(row, list) else type(row).__name__
            raise MatrixFormatError(f"row {i}: expected {cols} entries, found {found}")
        for j, value in enumerate(row):
            out[i, j] = _entry(value, i, j)
    return out


def matrix_to_obj(M) -> dict:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise MatrixFormatError("only 2-D matrices can be written")
    if not np.all(np.isfinite(M)):
        raise MatrixFormatError("refusing to write non-finite entries")
    return {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "data": [[[float(z.real), float(z.imag)] for z in row] for row in M],
    }


def _reject_constant(name):
    raise MatrixFormatError(f"non-finite literal {name}")


def loads_matrix(text: str) -> np.ndarray:
    try:
        obj = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return matrix_from_obj(obj)


def dumps_matrix(M) -> str:
    return json.dumps(matrix_to_obj(M))


def read_matrix(path) -> np.ndarray:
    path = Path(path)
    try:
        return loads_matrix(path.read_text())
    except MatrixFormatError as exc:
        raise MatrixFormatError(f"{path}: {exc}") from None


def write_matrix(path, M) -> None:
    Path(path).write_text(dumps_matrix(M) + "\n")
