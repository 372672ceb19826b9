"""
TSBATCH1 sample files: the 8-byte magic ``TSBATCH1``, then n and dim as
little-endian uint64, then n * dim little-endian float64 values in row-major order.
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np

from engine.errors import ParamsFileError

log = logging.getLogger(__name__)

MAGIC = b"TSBATCH1"
_HEADER = np.dtype([("n", "<u8"), ("dim", "<u8")])

PathLike = Union[str, Path]


def write_batch(values: np.ndarray, path: PathLike) -> Path:
    values = np.asarray(values, dtype="<f8")
    if values.ndim == 1:
        values = values[:, None]
    if values.ndim != 2:
        raise ValueError(f"batch must be 2-d, got shape {values.shape}")
    path = Path(path)
    header = np.array([(values.shape[0], values.shape[1])], dtype=_HEADER)
    with path.open("wb") as fh:
        fh.write(MAGIC)
        fh.write(header.tobytes())
        fh.write(np.ascontiguousarray(values).tobytes())
    log.info("Wrote %d x %d batch to %s", values.shape[0], values.shape[1], path)
    return path


def read_batch(path: PathLike) -> np.ndarray:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        log.error("Cannot read batch file %s: %s", path, e)
        raise ParamsFileError(f"cannot read {path}: {e}") from e
    if raw[:len(MAGIC)] != MAGIC:
        raise ParamsFileError(f"{path} is not a TSBATCH1 file")
    offset = len(MAGIC) + _HEADER.itemsize
    if len(raw) < offset:
        raise ParamsFileError(f"{path}: truncated header")
    header = np.frombuffer(raw[len(MAGIC):offset], dtype=_HEADER)[0]
    n, dim = int(header["n"]), int(header["dim"])
    payload = len(raw) - offset
    if payload != 8 * n * dim:
        raise ParamsFileError(f"{path}: expected {n * dim} values, found {payload / 8:g}")
    body = np.frombuffer(raw, dtype="<f8", offset=offset)
    return body.reshape(n, dim).astype(float)


__all__ = ["MAGIC", "write_batch", "read_batch"]
