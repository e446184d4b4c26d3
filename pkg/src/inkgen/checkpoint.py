"""Checkpoint container: named float64 arrays plus a JSON meta block.

Layout (little-endian throughout, documented for external tooling):

    bytes 0..7    magic ``b"INKCKPT\\x01"`` (trailing byte = format version)
    bytes 8..15   uint64 header length N
    bytes 16..16+N  UTF-8 JSON header::

        {"version": 1,
         "meta": {...caller JSON...},
         "arrays": [{"name": str, "shape": [int...], "offset": int}, ...]}

    then the raw C-order float64 array payloads at their offsets, counted
    from the end of the header.

Writes are atomic (temp file + rename) and byte-deterministic for equal
inputs: the header is serialized with sorted keys and no timestamps.
"""

from __future__ import annotations

import json
import os
import struct
from pathlib import Path

import numpy as np

MAGIC = b"INKCKPT\x01"
VERSION = 1


class CheckpointError(RuntimeError):
    pass


def save_checkpoint(path, arrays, meta=None):
    """Write named float64 arrays and a JSON-serializable meta dict."""
    path = Path(path)
    entries = []
    payloads = []
    offset = 0
    for name in arrays:
        arr = np.ascontiguousarray(arrays[name], dtype="<f8")
        entries.append({"name": name, "shape": list(arr.shape), "offset": offset})
        payloads.append(arr.tobytes())
        offset += arr.nbytes
    header = json.dumps(
        {"version": VERSION, "meta": meta or {}, "arrays": entries},
        sort_keys=True,
        separators=(",", ":"),
    ).encode("utf-8")
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(header)))
        fh.write(header)
        for blob in payloads:
            fh.write(blob)
    os.replace(tmp, path)
    return path


def load_checkpoint(path):
    """Read back (arrays, meta); arrays are fresh float64 copies."""
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic[:7] != MAGIC[:7]:
            raise CheckpointError(f"{path}: not a checkpoint file")
        if magic[7] != VERSION:
            raise CheckpointError(f"{path}: unsupported format version {magic[7]}")
        (hlen,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(hlen).decode("utf-8"))
        payload = fh.read()
    arrays = {}
    for entry in header["arrays"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        start = entry["offset"]
        arr = np.frombuffer(payload, dtype="<f8", count=count, offset=start)
        arrays[entry["name"]] = arr.reshape(shape).astype(np.float64)
    return arrays, header.get("meta", {})
