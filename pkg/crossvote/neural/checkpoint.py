"""Versioned binary checkpoint format for Q-networks.

Layout (little-endian):
    8 bytes   magic b"CRSVQNET"
    uint32    format version
    uint32    number of layer dims L
    L×uint32  layer dims
    float64…  parameters in layer order, each weight matrix row-major
              followed by its bias vector
"""
import struct
from pathlib import Path
from typing import Union

import numpy as np

from crossvote.errors import CheckpointError, DimensionError

from .mlp import Mlp

MAGIC = b"CRSVQNET"
FORMAT_VERSION = 1
_U32 = struct.Struct("<I")


def encode_checkpoint(net: Mlp) -> bytes:
    dims = net.layer_dims
    header = MAGIC + _U32.pack(FORMAT_VERSION) + _U32.pack(len(dims))
    header += b"".join(_U32.pack(d) for d in dims)
    body = b"".join(np.ascontiguousarray(p, dtype="<f8").tobytes() for p in net.parameters())
    return header + body


def decode_checkpoint(data: bytes) -> Mlp:
    if len(data) < len(MAGIC) + 8 or data[:len(MAGIC)] != MAGIC:
        raise CheckpointError("not a crossvote checkpoint (bad magic or truncated header)")
    offset = len(MAGIC)
    (version,) = _U32.unpack_from(data, offset)
    offset += 4
    if version != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version} (expected {FORMAT_VERSION})")
    (n_dims,) = _U32.unpack_from(data, offset)
    offset += 4
    if n_dims < 2 or len(data) < offset + 4 * n_dims:
        raise CheckpointError("corrupt checkpoint header")
    dims = [_U32.unpack_from(data, offset + 4 * i)[0] for i in range(n_dims)]
    offset += 4 * n_dims
    if min(dims) < 1:
        raise CheckpointError(f"inconsistent layer dims {dims}")

    n_params = sum(o * i + o for i, o in zip(dims[:-1], dims[1:]))
    expected = offset + 8 * n_params
    if len(data) != expected:
        raise CheckpointError(f"corrupt checkpoint: {len(data)} bytes, expected {expected}")
    flat = np.frombuffer(data, dtype="<f8", count=n_params, offset=offset).astype(np.float64)
    bad = int(np.count_nonzero(~np.isfinite(flat)))
    if bad:
        raise CheckpointError(f"checkpoint holds {bad} non-finite parameters")

    weights, biases = [], []
    cursor = 0
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        weights.append(flat[cursor:cursor + fan_in * fan_out].reshape(fan_out, fan_in).copy())
        cursor += fan_in * fan_out
        biases.append(flat[cursor:cursor + fan_out].copy())
        cursor += fan_out
    try:
        return Mlp(weights, biases)
    except DimensionError as e:
        raise CheckpointError(str(e)) from e


def save_checkpoint(net: Mlp, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_checkpoint(net))
    return path


def load_checkpoint(path: Union[str, Path]) -> Mlp:
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f"checkpoint not found: {path}")
    return decode_checkpoint(path.read_bytes())
