"""Writer for the engine's binary embedding-store layout.

The consuming engine defines the format: a directory holding
manifest.json (version, dim, count, dtype, l2_normalized flag, ids) and
data.bin (row-major little-endian IEEE-754 binary32). This module writes
that layout bit-stably and atomically; it deliberately implements the
file contract rather than importing the engine.
"""
from __future__ import annotations

import json
import os
import shutil
import tempfile
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InvalidInputError

STORE_VERSION = 1
DTYPE_TAG = "f32le"
_F32LE = np.dtype("<f4")


def write_store(path, ids: Sequence[str], rows, l2_normalized: bool = False) -> Path:
    """Write ids + rows as a store directory; returns the path.

    The write is atomic (staged in a sibling temp directory, then
    renamed), so a crash never leaves a half-written store behind.
    """
    path = Path(path)
    ids = [str(i) for i in ids]
    if not ids:
        raise InvalidInputError("store needs at least one row")
    if any(not i for i in ids):
        raise InvalidInputError("ids must be nonempty strings")
    if len(set(ids)) != len(ids):
        raise InvalidInputError("ids must be unique")

    matrix = np.asarray(rows, dtype=np.float64)
    if matrix.ndim != 2:
        raise InvalidInputError(f"rows must be a 2-d matrix, got ndim {matrix.ndim}")
    if matrix.shape[0] != len(ids):
        raise InvalidInputError(f"{len(ids)} ids for {matrix.shape[0]} rows")
    if matrix.shape[1] < 1:
        raise InvalidInputError("rows must have at least one column")
    if not np.all(np.isfinite(matrix)):
        raise InvalidInputError("rows contain NaN or Inf")

    manifest = {
        "version": STORE_VERSION,
        "dim": int(matrix.shape[1]),
        "count": int(matrix.shape[0]),
        "dtype": DTYPE_TAG,
        "l2_normalized": bool(l2_normalized),
        "ids": ids,
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=f".{path.name}.tmp-", dir=path.parent))
    try:
        (tmp / "manifest.json").write_text(
            json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
        )
        (tmp / "data.bin").write_bytes(
            np.ascontiguousarray(matrix, dtype=_F32LE).tobytes(order="C")
        )
        if path.exists():
            shutil.rmtree(path)
        os.replace(tmp, path)
    except Exception:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return path
