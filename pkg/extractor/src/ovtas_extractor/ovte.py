"""Writer/reader for the engine's binary embedding container.

Layout: magic ``OVTE``, uint32 LE version (=1), uint64 LE rows, uint64 LE
cols, then rows*cols float32 LE values in row-major order. Implemented here
independently of the engine so the two codecs cross-check each other.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"OVTE"
VERSION = 1
_HEADER = struct.Struct("<4sIQQ")


def write_matrix(values: np.ndarray, path: str | Path) -> None:
    values = np.asarray(values)
    if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {values.shape}")
    if not np.isfinite(values).all():
        raise ValueError("refusing to write non-finite values")
    payload = np.ascontiguousarray(values, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, values.shape[0], values.shape[1]))
        fh.write(payload.tobytes())


def read_matrix(path: str | Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: shorter than the header")
    magic, version, rows, cols = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    payload = raw[_HEADER.size :]
    if len(payload) != rows * cols * 4:
        raise ValueError(f"{path}: truncated payload")
    return np.frombuffer(payload, dtype="<f4").reshape(rows, cols).copy()
