"""Binary field interchange: little-endian complex pairs plus JSON sidecar."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def save_field(path, arr, meta: dict | None = None):
    """Write a complex field as little-endian (re, im) float64 pairs.

    The JSON sidecar `<path>.json` records shape and any caller metadata;
    arrays are row-major.
    """
    path = Path(path)
    arr = np.ascontiguousarray(np.asarray(arr, dtype=complex))
    flat = np.empty(arr.size * 2, dtype="<f8")
    flat[0::2] = arr.real.ravel()
    flat[1::2] = arr.imag.ravel()
    path.write_bytes(flat.tobytes())
    sidecar = {"shape": list(arr.shape), "dtype": "complex128-le-pairs"}
    sidecar.update(meta or {})
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(sidecar, sort_keys=True))


def load_field(path):
    """Read a field written by save_field; returns (array, sidecar)."""
    path = Path(path)
    sidecar = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    flat = np.frombuffer(path.read_bytes(), dtype="<f8")
    arr = flat[0::2] + 1j * flat[1::2]
    return arr.reshape(sidecar["shape"]), sidecar
