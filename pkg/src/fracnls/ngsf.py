"""NGSF binary field records.

Layout of one record (all little-endian)::

    b"NGSF"              magic
    uint32               format version
    uint32               N
    uint32 * N           points per axis
    float64 * N          box length per axis
    float64              alpha
    float64 * prod(M)    row-major payload

A file is a concatenation of records.  Complex fields are stored as two
consecutive records holding the real and the imaginary plane.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .grid import Field, TorusGrid

MAGIC = b"NGSF"
VERSION = 1


def encode(field: Field, alpha: float) -> bytes:
    g = field.grid
    head = MAGIC + struct.pack("<II", VERSION, g.dim)
    head += struct.pack(f"<{g.dim}I", *g.points)
    head += struct.pack(f"<{g.dim}d", *g.length)
    head += struct.pack("<d", float(alpha))
    return head + np.ascontiguousarray(field.values, dtype="<f8").tobytes()


def decode(buf: bytes, offset: int = 0):
    """Decode one record starting at ``offset``; returns ``(field, alpha, next_offset)``."""
    if buf[offset : offset + 4] != MAGIC:
        raise ValueError(f"bad NGSF magic at byte {offset}")
    version, dim = struct.unpack_from("<II", buf, offset + 4)
    if version != VERSION:
        raise ValueError(f"unsupported NGSF version {version}")
    pos = offset + 12
    points = struct.unpack_from(f"<{dim}I", buf, pos)
    pos += 4 * dim
    length = struct.unpack_from(f"<{dim}d", buf, pos)
    pos += 8 * dim
    (alpha,) = struct.unpack_from("<d", buf, pos)
    pos += 8
    n = int(np.prod(points))
    end = pos + 8 * n
    if end > len(buf):
        raise ValueError("truncated NGSF payload")
    vals = np.frombuffer(buf, dtype="<f8", count=n, offset=pos).reshape(points)
    grid = TorusGrid(dim, length, points)
    return Field(grid, vals.astype(float), check=False), alpha, end


def write_field(path, field: Field, alpha: float) -> None:
    Path(path).write_bytes(encode(field, alpha))


def read_field(path):
    """Return ``(field, alpha)`` from a single-record file."""
    field, alpha, _ = decode(Path(path).read_bytes())
    return field, alpha


def read_records(path):
    buf = Path(path).read_bytes()
    out, pos = [], 0
    while pos < len(buf):
        field, alpha, pos = decode(buf, pos)
        out.append((field, alpha))
    return out


def write_complex_sequence(path, grid: TorusGrid, arrays, alpha: float) -> None:
    with open(path, "wb") as fh:
        for arr in arrays:
            fh.write(encode(Field(grid, arr.real, check=False), alpha))
            fh.write(encode(Field(grid, arr.imag, check=False), alpha))


def read_complex_sequence(path):
    recs = read_records(path)
    if len(recs) % 2:
        raise ValueError("complex sequence needs an even number of records")
    return [recs[i][0].values + 1j * recs[i + 1][0].values for i in range(0, len(recs), 2)]
