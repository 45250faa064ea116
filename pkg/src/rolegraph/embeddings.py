"""Embedding matrices and their bit-exact binary file format.

File layout: 4 ASCII magic bytes ``EMB1``, then the row count and dimension
as unsigned 32-bit little-endian integers, then rows*dims IEEE-754 32-bit
little-endian floats in row-major order. Reading inverts writing exactly, so
write -> read is value-identical and read -> write is byte-identical.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionError, FormatError, NonFiniteError

MAGIC = b"EMB1"
_HEADER = struct.Struct("<4sII")


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Row-major matrix of sentence embedding vectors, 32-bit precision.

    Row i corresponds to corpus sentence i in global order.
    """

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.data, dtype=np.float32)
        if arr.ndim != 2:
            raise DimensionError(f"embedding matrix must be 2-d, got {arr.ndim}-d")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionError(f"embedding matrix shape {arr.shape} is degenerate")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError("embedding matrix contains NaN or infinity")
        object.__setattr__(self, "data", arr)

    @property
    def rows(self) -> int:
        return int(self.data.shape[0])

    @property
    def dims(self) -> int:
        return int(self.data.shape[1])


def write_embeddings(m: EmbeddingMatrix, path) -> None:
    """Write a matrix in the EMB1 binary format."""
    header = _HEADER.pack(MAGIC, m.rows, m.dims)
    body = m.data.astype("<f4", copy=False).tobytes(order="C")
    Path(path).write_bytes(header + body)


def read_embeddings(path) -> EmbeddingMatrix:
    """Read an EMB1 file, validating magic, length, and finiteness."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise FormatError(
            f"truncated header: {len(raw)} bytes, need at least {_HEADER.size}"
        )
    magic, rows, dims = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    expected = _HEADER.size + 4 * rows * dims
    if len(raw) != expected:
        raise FormatError(
            f"truncated payload: {len(raw)} bytes, header implies {expected}"
        )
    if rows < 1 or dims < 1:
        raise DimensionError(f"degenerate shape {rows}x{dims} in header")
    values = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size)
    values = values.reshape(rows, dims).astype(np.float32)
    if not np.all(np.isfinite(values)):
        raise NonFiniteError("embedding file contains NaN or infinity")
    return EmbeddingMatrix(values)
