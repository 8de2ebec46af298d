"""Embedding matrix files: a small binary container with a CSV fallback.

Binary layout (little endian)::

    magic   8 bytes  b"MINTEMBD"
    version u32      1
    n       u64      rows
    d       u64      columns
    dtype   u8       4 = float32, 8 = float64
    pad     7 bytes  zero
    payload n*d*dtype bytes, row-major

Files whose name ends in ``.csv`` use the fallback: one header row
(``e0,e1,...``) then one row per embedding.
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

MAGIC = b"MINTEMBD"
VERSION = 1
_HEADER = struct.Struct("<8sIQQB7x")
_DTYPES = {4: np.dtype("<f4"), 8: np.dtype("<f8")}


class EmbeddingFormatError(ValueError):
    pass


def write_embeddings(path: str | Path, H: np.ndarray, dtype: str = "float64") -> None:
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] == 0 or H.shape[1] == 0:
        raise EmbeddingFormatError(f"need a non-empty 2-D matrix, got shape {H.shape}")
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f"e{j}" for j in range(H.shape[1])])
            for row in H:
                w.writerow([repr(float(v)) for v in row])
        return
    size = {"float32": 4, "float64": 8}.get(dtype)
    if size is None:
        raise EmbeddingFormatError(f"unsupported dtype {dtype!r}")
    payload = np.ascontiguousarray(H, dtype=_DTYPES[size]).tobytes()
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, H.shape[0], H.shape[1], size))
        fh.write(payload)


def read_embeddings(path: str | Path) -> np.ndarray:
    """Load a matrix as float64. Raises EmbeddingFormatError on malformed input."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        if len(rows) < 2:
            raise EmbeddingFormatError(f"{path}: CSV needs a header and at least one row")
        width = len(rows[0])
        try:
            data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=np.float64)
        except ValueError as exc:
            raise EmbeddingFormatError(f"{path}: {exc}") from None
        if data.ndim != 2 or data.shape[1] != width or width == 0:
            raise EmbeddingFormatError(f"{path}: ragged rows")
        return data
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise EmbeddingFormatError(f"{path}: truncated header")
    magic, version, n, d, size = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise EmbeddingFormatError(f"{path}: bad magic")
    if version != VERSION:
        raise EmbeddingFormatError(f"{path}: unsupported version {version}")
    if size not in _DTYPES or n == 0 or d == 0:
        raise EmbeddingFormatError(f"{path}: bad shape or dtype in header")
    expected = n * d * size
    if len(raw) - _HEADER.size != expected:
        raise EmbeddingFormatError(f"{path}: payload is {len(raw) - _HEADER.size} bytes, expected {expected}")
    data = np.frombuffer(raw, dtype=_DTYPES[size], offset=_HEADER.size).reshape(n, d)
    return data.astype(np.float64)
