"""Versioned binary container for named float64 arrays plus JSON metadata.

Layout: ``b"MINTCKPT"``, uint32 version, uint64 header length, UTF-8 JSON
header (metadata and array names/shapes), then each array as little-endian
float64 in header order. Writing is byte-deterministic.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .nn import DenseNet
from .scaler import ScalerState

MAGIC = b"MINTCKPT"
VERSION = 1


def save_arrays(path: str | Path, meta: dict, arrays: dict[str, np.ndarray]) -> None:
    names = list(arrays)
    header = {
        "meta": meta,
        "arrays": [{"name": n, "shape": list(np.shape(arrays[n]))} for n in names],
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IQ", VERSION, len(blob)))
        fh.write(blob)
        for n in names:
            fh.write(np.ascontiguousarray(arrays[n], dtype="<f8").tobytes())


def load_arrays(path: str | Path) -> tuple[dict, dict[str, np.ndarray]]:
    data = Path(path).read_bytes()
    if data[:8] != MAGIC:
        raise ValueError(f"{path}: not a checkpoint file")
    version, hlen = struct.unpack_from("<IQ", data, 8)
    if version != VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {version}")
    off = 8 + 12
    header = json.loads(data[off : off + hlen].decode("utf-8"))
    off += hlen
    arrays = {}
    for entry in header["arrays"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(data, dtype="<f8", count=count, offset=off).astype(np.float64).reshape(shape)
        arrays[entry["name"]] = arr
        off += 8 * count
    if off != len(data):
        raise ValueError(f"{path}: payload length does not match header")
    return header["meta"], arrays


def net_to_arrays(net: DenseNet, prefix: str = "") -> tuple[dict, dict[str, np.ndarray]]:
    meta = {"dims": list(net.dims), "activation": net.activation, "dropout": list(net.dropout)}
    arrays = {}
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        arrays[f"{prefix}W{i}"] = w
        arrays[f"{prefix}b{i}"] = b
    return meta, arrays


def net_from_arrays(meta: dict, arrays: dict[str, np.ndarray], prefix: str = "") -> DenseNet:
    n = len(meta["dims"]) - 1
    return DenseNet(
        tuple(meta["dims"]),
        [arrays[f"{prefix}W{i}"].copy() for i in range(n)],
        [arrays[f"{prefix}b{i}"].copy() for i in range(n)],
        meta["activation"],
        tuple(meta["dropout"]),
    )


def scaler_to_arrays(s: ScalerState, prefix: str = "scaler_") -> dict[str, np.ndarray]:
    return {f"{prefix}mean": s.mean, f"{prefix}std": s.std}


def scaler_from_arrays(arrays: dict[str, np.ndarray], prefix: str = "scaler_") -> ScalerState:
    return ScalerState(arrays[f"{prefix}mean"].copy(), arrays[f"{prefix}std"].copy())
