"""Binary checkpoint format.

Layout: magic "FFRCKPT1", 8-byte little-endian manifest length, UTF-8 JSON
manifest {version, config, tensors: [{name, shape, offset, len}]}, then the
concatenated little-endian float32 tensor payloads in manifest order.
Offsets are relative to the start of the payload section; len is in bytes.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import BadMagic, ShapeManifestMismatch, TruncatedFile
from .config import ModelConfig
from .model import ModelParams

MAGIC = b"FFRCKPT1"
CHECKPOINT_VERSION = 1


def save_checkpoint(params: ModelParams, path: str | Path) -> None:
    tensors = []
    payloads = []
    offset = 0
    for name, arr in params.tensors.items():
        data = np.ascontiguousarray(arr, dtype="<f4").tobytes()
        tensors.append(
            {"name": name, "shape": list(arr.shape), "offset": offset, "len": len(data)}
        )
        payloads.append(data)
        offset += len(data)
    manifest = json.dumps(
        {
            "version": CHECKPOINT_VERSION,
            "config": params.config.to_dict(),
            "tensors": tensors,
        },
        ensure_ascii=False,
        sort_keys=True,
    ).encode("utf-8")
    with Path(path).open("wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<Q", len(manifest)))
        f.write(manifest)
        for data in payloads:
            f.write(data)


def load_checkpoint(path: str | Path) -> ModelParams:
    blob = Path(path).read_bytes()
    if len(blob) < len(MAGIC) + 8:
        raise TruncatedFile(f"{path}: file shorter than header")
    if blob[: len(MAGIC)] != MAGIC:
        raise BadMagic(f"{path}: bad magic bytes")
    (mlen,) = struct.unpack("<Q", blob[len(MAGIC) : len(MAGIC) + 8])
    header_end = len(MAGIC) + 8
    if len(blob) < header_end + mlen:
        raise TruncatedFile(f"{path}: truncated manifest")
    manifest = json.loads(blob[header_end : header_end + mlen].decode("utf-8"))
    config = ModelConfig.from_dict(manifest["config"])
    payload = blob[header_end + mlen :]

    tensors: dict[str, np.ndarray] = {}
    for entry in manifest["tensors"]:
        shape = tuple(entry["shape"])
        n = int(np.prod(shape)) if shape else 1
        if entry["len"] != n * 4:
            raise ShapeManifestMismatch(
                f"{entry['name']}: manifest len {entry['len']} != {n * 4} for shape {shape}"
            )
        start, end = entry["offset"], entry["offset"] + entry["len"]
        if end > len(payload):
            raise TruncatedFile(f"{path}: payload missing bytes for {entry['name']}")
        arr = np.frombuffer(payload[start:end], dtype="<f4").reshape(shape)
        tensors[entry["name"]] = arr.astype(np.float64)
    return ModelParams(config, tensors)
