"""On-disk containers: the multi-view tensor format and label files.

A tensor file is one ASCII header line "MVT1 <N> <M> <D>" followed by
N*M*D little-endian float64 values ordered instance-major, then view, then
feature. Labels are plain ASCII, one integer per line. All writers go
through a temp file plus atomic rename so a failed write never leaves a
partial output.
"""

from __future__ import annotations

import os

import numpy as np

from .bootstrap import MultiViewDataset

TENSOR_MAGIC = "MVT1"


def atomic_write_bytes(path, data):
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def atomic_write_text(path, text):
    atomic_write_bytes(path, text.encode("ascii"))


def write_tensor(path, tensor):
    tensor = np.asarray(tensor, dtype=np.float64)
    if tensor.ndim != 3:
        raise ValueError(f"tensor must be 3-dimensional, got shape {tensor.shape}")
    n, m, d = tensor.shape
    header = f"{TENSOR_MAGIC} {n} {m} {d}\n".encode("ascii")
    payload = np.ascontiguousarray(tensor, dtype="<f8").tobytes()
    atomic_write_bytes(path, header + payload)


def read_tensor(path):
    with open(path, "rb") as fh:
        buf = fh.read()
    end = buf.find(b"\n")
    if end < 0:
        raise ValueError(f"{path}: missing tensor header")
    parts = buf[:end].decode("ascii", errors="replace").split()
    if len(parts) != 4 or parts[0] != TENSOR_MAGIC:
        raise ValueError(f"{path}: not a tensor file (header {parts!r})")
    n, m, d = (int(p) for p in parts[1:])
    payload = buf[end + 1 :]
    expected = n * m * d * 8
    if len(payload) != expected:
        raise ValueError(
            f"{path}: payload has {len(payload)} bytes, expected {expected}"
        )
    values = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    return values.reshape(n, m, d)


def write_labels(path, labels):
    text = "".join(f"{int(v)}\n" for v in labels)
    atomic_write_text(path, text)


def read_labels(path):
    with open(path, "r", encoding="ascii") as fh:
        return np.array([int(line) for line in fh if line.strip()], dtype=int)


def dataset_from_tensor(tensor, labels=None):
    """Wrap an (N, M, D) tensor as a MultiViewDataset; labels become ids."""
    n = tensor.shape[0]
    ids = list(range(n)) if labels is None else [int(v) for v in labels]
    if len(ids) != n:
        raise ValueError(f"{len(ids)} labels for {n} instances")
    return MultiViewDataset(instance_ids=ids, views=[tensor[i] for i in range(n)])
