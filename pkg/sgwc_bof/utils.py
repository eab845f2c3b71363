# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""Small helpers shared by the pipeline, the store and the CLI."""

from __future__ import annotations

import csv
import hashlib
import json
import os
import struct
import tempfile
from collections.abc import Iterator, Sequence
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Any

import numpy as np

_TRUE_VALUES = {"true", "1", "yes", "on", "enable", "enabled"}
_FALSE_VALUES = {"false", "0", "no", "off", "disable", "disabled"}


def parse_bool_option(value, option_name: str) -> bool:
    """Parse a CLI boolean option that accepts explicit True/False values."""
    if isinstance(value, bool):
        return value
    normalized = str(value).strip().lower()
    if normalized in _TRUE_VALUES:
        return True
    if normalized in _FALSE_VALUES:
        return False
    raise ValueError(f"{option_name} expects a boolean value (true/false), got {value!r}.")


def hash_arrays(*arrays: np.ndarray) -> str:
    """Content hash of a sequence of arrays (dtype, shape and bytes)."""
    digest = hashlib.sha256()
    for array in arrays:
        contiguous = np.ascontiguousarray(array)
        digest.update(str(contiguous.dtype.str).encode())
        digest.update(str(contiguous.shape).encode())
        digest.update(contiguous.tobytes())
    return digest.hexdigest()


def hash_params(**params: Any) -> str:
    """Short stable hash of a parameter dictionary."""
    payload = json.dumps(params, sort_keys=True, default=str)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


@contextmanager
def atomic_write(path: str | Path, mode: str = "wb") -> Iterator[IO]:
    """Write to a temp file next to *path*, then rename it into place.

    Readers either see the previous file or the complete new one.
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    try:
        with os.fdopen(fd, mode) as handle:
            yield handle
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def format_TSV(headers: list[str], rows: list[list[Any]]) -> str:
    """
    Format data as TSV (Tab-Separated Values)

    Args:
        headers: The list of headers
        rows: The list of data rows

    Returns:
        The formatted TSV string
    """
    if not headers or not rows:
        return "No data to display"

    result = ["\t".join(headers)]
    for row in rows:
        result.append("\t".join(str(cell) for cell in row))
    return "\n".join(result)


def write_csv(path: str | Path, headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> Path:
    """Write a CSV file atomically and return its path."""
    with atomic_write(path, "w") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(headers)
        writer.writerows(rows)
    return Path(path)


HEADER = struct.Struct("<8sI4x")


class CacheFormatError(ValueError):
    """Raised when a binary file has the wrong magic, version or shape."""


def write_header(handle: IO[bytes], magic: bytes, version: int) -> None:
    """16-byte little-endian header: 8-byte magic, u32 version, 4 reserved bytes."""
    if len(magic) != 8:
        raise ValueError(f"magic must be 8 bytes, got {magic!r}")
    handle.write(HEADER.pack(magic, version))


def read_header(handle: IO[bytes], magic: bytes, version: int) -> None:
    raw = handle.read(HEADER.size)
    if len(raw) != HEADER.size:
        raise CacheFormatError("Truncated header")
    found_magic, found_version = HEADER.unpack(raw)
    if found_magic != magic:
        raise CacheFormatError(f"Bad magic {found_magic!r}, expected {magic!r}")
    if found_version != version:
        raise CacheFormatError(f"Unsupported version {found_version}, expected {version}")


def read_array(handle: IO[bytes], count: int, dtype: str = "<f8") -> np.ndarray:
    """Read exactly *count* items of *dtype* or raise :class:`CacheFormatError`."""
    itemsize = np.dtype(dtype).itemsize
    raw = handle.read(count * itemsize)
    if len(raw) != count * itemsize:
        raise CacheFormatError(f"Expected {count} values, file is truncated")
    return np.frombuffer(raw, dtype=dtype).copy()
