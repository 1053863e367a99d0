"""
Output files: CSV curves, binary trajectories and JSON run manifests.

Trajectory file layout (all little-endian):

    magic        8 bytes   b"RHEOBRWN"
    version      uint32
    dt           float64   seconds
    n_steps      uint64
    N            uint32
    medium tag   16 bytes  ASCII, NUL padded
    velocities   n_steps * N float64, row-major (step, axis)
    positions    n_steps * N float64, row-major (step, axis)
"""

import csv
import json
import os
import struct
from typing import Any, Dict, List, NamedTuple, Sequence, Tuple

import numpy as np
from cryptography.hazmat.primitives import hashes

from rheobrown import __version__
from rheobrown.core.curves import Normalization, SpectrumCurve
from rheobrown.core.exceptions import ConfigError

TRAJECTORY_MAGIC = b"RHEOBRWN"
TRAJECTORY_VERSION = 1
_HEADER = struct.Struct("<8sIdQI16s")

SPECTRUM_HEADERS = {
    Normalization.NORMALIZED: ("omega_dimensionless", "psd_normalized"),
    Normalization.DIMENSIONAL: ("omega_rad_s", "psd_si"),
}


class TrajectoryFile(NamedTuple):
    dt: float
    medium: str
    velocities: np.ndarray
    positions: np.ndarray


def file_digest(filepath: str) -> str:
    """
    SHA-256 digest of a file's content.

    Args:
        filepath: File to hash

    Returns:
        Hex digest
    """
    digest = hashes.Hash(hashes.SHA256())
    with open(filepath, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.finalize().hex()


def write_columns_csv(filepath: str, headers: Sequence[str], columns: Sequence[np.ndarray]) -> str:
    """
    Write equal-length columns as CSV with shortest round-trip float text.

    Args:
        filepath: Destination
        headers: Column names
        columns: Column arrays

    Returns:
        The path written
    """
    arrays = [np.asarray(column, dtype=float) for column in columns]
    with open(filepath, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(headers)
        for row in zip(*arrays):
            writer.writerow([repr(float(value)) for value in row])
    return filepath


def read_columns_csv(filepath: str) -> Tuple[List[str], List[np.ndarray]]:
    """
    Read a CSV written by ``write_columns_csv``.

    Returns:
        Headers and one float array per column
    """
    with open(filepath, "r", newline="") as f:
        reader = csv.reader(f)
        headers = next(reader)
        rows = [[float(value) for value in row] for row in reader if row]
    data = np.array(rows, dtype=float).reshape(-1, len(headers))
    return headers, [data[:, k].copy() for k in range(len(headers))]


def write_spectrum_csv(filepath: str, curve: SpectrumCurve) -> str:
    """Write a spectrum with the header matching its normalization."""
    return write_columns_csv(filepath, SPECTRUM_HEADERS[curve.normalization], [curve.omega, curve.values])


def write_trajectory(
    filepath: str, dt: float, medium: str, velocities: np.ndarray, positions: np.ndarray
) -> str:
    """
    Write one trajectory in the binary columnar format.

    Args:
        filepath: Destination
        dt: Sampling step (s)
        medium: Medium tag, at most 16 ASCII characters
        velocities: Array (n_steps, N)
        positions: Array (n_steps, N)

    Returns:
        The path written
    """
    velocities = np.asarray(velocities, dtype="<f8")
    positions = np.asarray(positions, dtype="<f8")
    if velocities.shape != positions.shape or velocities.ndim != 2:
        raise ValueError("velocities and positions must share shape (n_steps, N)")
    tag = medium.encode("ascii")
    if len(tag) > 16:
        raise ValueError(f"medium tag '{medium}' longer than 16 characters")
    n_steps, n_dims = velocities.shape
    header = _HEADER.pack(TRAJECTORY_MAGIC, TRAJECTORY_VERSION, dt, n_steps, n_dims, tag)
    with open(filepath, "wb") as f:
        f.write(header)
        f.write(np.ascontiguousarray(velocities).tobytes())
        f.write(np.ascontiguousarray(positions).tobytes())
    return filepath


def read_trajectory(filepath: str) -> TrajectoryFile:
    """
    Read a trajectory file.

    Raises:
        ConfigError: If the file is not a trajectory file of a known version
    """
    with open(filepath, "rb") as f:
        raw = f.read()
    if len(raw) < _HEADER.size:
        raise ConfigError(f"{filepath} is too short to be a trajectory file")
    magic, version, dt, n_steps, n_dims, tag = _HEADER.unpack_from(raw)
    if magic != TRAJECTORY_MAGIC:
        raise ConfigError(f"{filepath} is not a trajectory file")
    if version != TRAJECTORY_VERSION:
        raise ConfigError(f"{filepath} has unsupported version {version}")
    count = n_steps * n_dims
    body = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if body.size != 2 * count:
        raise ConfigError(f"{filepath} is truncated")
    velocities = body[:count].reshape(n_steps, n_dims).copy()
    positions = body[count:].reshape(n_steps, n_dims).copy()
    return TrajectoryFile(dt, tag.rstrip(b"\0").decode("ascii"), velocities, positions)


def write_manifest(
    filepath: str,
    command: str,
    config: Dict[str, Any],
    outputs: Sequence[str],
    seed: Any = None,
    extra: Dict[str, Any] = None,
) -> str:
    """
    Write the JSON run manifest listing every output with its digest.

    The manifest holds no timestamps, so reruns with the same inputs
    reproduce it byte for byte.

    Args:
        filepath: Destination
        command: Subcommand name
        config: Configuration echo
        outputs: Paths of the files produced
        seed: Root seed, if any
        extra: Further command-specific records

    Returns:
        The path written
    """
    base = os.path.dirname(os.path.abspath(filepath))
    manifest = {
        "tool": "rheobrown",
        "version": __version__,
        "command": command,
        "seed": seed,
        "config": config,
        "files": [
            {"path": os.path.relpath(os.path.abspath(path), base), "sha256": file_digest(path)}
            for path in outputs
        ],
    }
    if extra:
        manifest.update(extra)
    with open(filepath, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True, default=_json_default)
        f.write("\n")
    return filepath


def _json_default(value: Any) -> Any:
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"cannot serialize {type(value).__name__}")
