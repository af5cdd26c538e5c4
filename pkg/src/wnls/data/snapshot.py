# snapshot.py
"""
Binary snapshot codec.

Layout (little-endian):
    4 bytes   magic "SNLS"
    u32       format version
    u32       n
    f64       half_width
    f64       b
    f64       t
    n² × (f64 re, f64 im) samples, row-major
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..calculations.errors import (
    BadMagicError,
    OutputError,
    SnapshotError,
    TruncatedPayloadError,
    VersionMismatchError,
)
from ..calculations.grid import Field, make_grid
from ..config import settings

logger = logging.getLogger(__name__)

HEADER = struct.Struct("<4sIIddd")
SAMPLE_DTYPE = np.dtype("<c16")


@dataclass(frozen=True)
class SnapshotMeta:
    b: float
    t: float = 0.0


def write_snapshot(u: Field, meta: SnapshotMeta) -> bytes:
    header = HEADER.pack(
        settings.SNAPSHOT_MAGIC,
        settings.SNAPSHOT_VERSION,
        u.grid.n,
        u.grid.half_width,
        meta.b,
        meta.t,
    )
    return header + np.ascontiguousarray(u.values, dtype=SAMPLE_DTYPE).tobytes(order="C")


def read_snapshot(data: bytes) -> tuple[Field, SnapshotMeta]:
    """
    Decode a snapshot.

    Raises:
        BadMagicError: the first four bytes are not "SNLS"
        VersionMismatchError: unsupported format version
        TruncatedPayloadError: fewer bytes than the header announces
    """
    if len(data) < len(settings.SNAPSHOT_MAGIC):
        raise TruncatedPayloadError(f"truncated payload: {len(data)} bytes, header needs {HEADER.size}")
    if data[:4] != settings.SNAPSHOT_MAGIC:
        raise BadMagicError(f"bad magic {data[:4]!r}, expected {settings.SNAPSHOT_MAGIC!r}")
    if len(data) < HEADER.size:
        raise TruncatedPayloadError(f"truncated payload: {len(data)} bytes, header needs {HEADER.size}")
    _, version, n, half_width, b, t = HEADER.unpack_from(data)
    if version != settings.SNAPSHOT_VERSION:
        raise VersionMismatchError(f"snapshot version {version} unsupported (expected {settings.SNAPSHOT_VERSION})")
    expected = HEADER.size + n * n * SAMPLE_DTYPE.itemsize
    if len(data) < expected:
        raise TruncatedPayloadError(f"truncated payload: {len(data)} bytes, expected {expected} for n={n}")
    if len(data) > expected:
        raise SnapshotError(f"{len(data) - expected} trailing bytes after n={n} samples")
    grid = make_grid(n, half_width)
    samples = np.frombuffer(data, dtype=SAMPLE_DTYPE, count=n * n, offset=HEADER.size)
    return Field(grid, samples.reshape(n, n)), SnapshotMeta(b=b, t=t)


def save_snapshot(path, u: Field, meta: SnapshotMeta) -> Path:
    path = Path(path)
    payload = write_snapshot(u, meta)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
    except OSError as exc:
        raise OutputError(f"cannot write snapshot {path}: {exc}") from exc
    logger.debug(f"Snapshot t={meta.t:.6g} written to {path}")
    return path


def load_snapshot(path) -> tuple[Field, SnapshotMeta]:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise SnapshotError(f"cannot read snapshot {path}: {exc}") from exc
    return read_snapshot(data)
