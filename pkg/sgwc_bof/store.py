# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""
Descriptor Store Module

On-disk cache for the expensive per-mesh products (eigenbases, local
signatures, geodesic matrices) and for trained vocabularies. Entries are keyed
by mesh content hash plus a parameter hash and written atomically, so several
worker processes can share one cache root.
"""

from __future__ import annotations

import struct
from collections import Counter
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import IO, Any, TypeVar

import numpy as np

from sgwc_bof.bof import ClusterStats, Codebook
from sgwc_bof.global_descriptor import GeodesicMatrix
from sgwc_bof.laplacian import EigenBasis
from sgwc_bof.log import logger
from sgwc_bof.utils import (
    CacheFormatError,
    atomic_write,
    hash_params,
    read_array,
    read_header,
    write_header,
)

T = TypeVar("T")

FORMAT_VERSION = 1
_U64 = struct.Struct("<Q")
_PAIR = struct.Struct("<QQ")
_CODEBOOK_META = struct.Struct("<QQdq")


class EntryKind(str, Enum):
    EIGENBASIS = "eigenbasis"
    SIGNATURES = "signatures"
    GEODESICS = "geodesics"
    CODEBOOK = "codebook"

    @property
    def magic(self) -> bytes:
        return {
            EntryKind.EIGENBASIS: b"SGWCEIG\x00",
            EntryKind.SIGNATURES: b"SGWCSIG\x00",
            EntryKind.GEODESICS: b"SGWCGEO\x00",
            EntryKind.CODEBOOK: b"SGWCVOC\x00",
        }[self]


def _unpack(layout: struct.Struct, handle: IO[bytes]) -> tuple:
    raw = handle.read(layout.size)
    if len(raw) != layout.size:
        raise CacheFormatError("Truncated file")
    return layout.unpack(raw)


def _expect_end(handle: IO[bytes]) -> None:
    if handle.read(1):
        raise CacheFormatError("Trailing bytes after payload")


def write_eigenbasis(handle: IO[bytes], basis: EigenBasis) -> None:
    """m and q, eigenvalues, column-major eigenfunctions, vertex areas."""
    write_header(handle, EntryKind.EIGENBASIS.magic, FORMAT_VERSION)
    handle.write(_PAIR.pack(basis.n_vertices, basis.count))
    handle.write(basis.eigenvalues.astype("<f8").tobytes())
    handle.write(basis.eigenfunctions.astype("<f8").tobytes(order="F"))
    handle.write(basis.vertex_areas.astype("<f8").tobytes())


def read_eigenbasis(handle: IO[bytes]) -> EigenBasis:
    read_header(handle, EntryKind.EIGENBASIS.magic, FORMAT_VERSION)
    m, q = _unpack(_PAIR, handle)
    eigenvalues = read_array(handle, q)
    eigenfunctions = read_array(handle, m * q).reshape((m, q), order="F")
    areas = read_array(handle, m)
    _expect_end(handle)
    return EigenBasis(eigenvalues, eigenfunctions, areas)


def write_signatures(handle: IO[bytes], values: np.ndarray) -> None:
    write_header(handle, EntryKind.SIGNATURES.magic, FORMAT_VERSION)
    handle.write(_PAIR.pack(*values.shape))
    handle.write(np.ascontiguousarray(values, dtype="<f8").tobytes())


def read_signatures(handle: IO[bytes]) -> np.ndarray:
    read_header(handle, EntryKind.SIGNATURES.magic, FORMAT_VERSION)
    rows, cols = _unpack(_PAIR, handle)
    values = read_array(handle, rows * cols).reshape(rows, cols)
    _expect_end(handle)
    return values


def write_geodesics(handle: IO[bytes], geodesics: GeodesicMatrix) -> None:
    """m, the normalizing diameter, then m x m row-major normalized distances."""
    write_header(handle, EntryKind.GEODESICS.magic, FORMAT_VERSION)
    handle.write(_U64.pack(geodesics.n_vertices))
    handle.write(struct.pack("<d", geodesics.scale))
    handle.write(np.ascontiguousarray(geodesics.distances, dtype="<f8").tobytes())


def read_geodesics(handle: IO[bytes]) -> GeodesicMatrix:
    read_header(handle, EntryKind.GEODESICS.magic, FORMAT_VERSION)
    (m,) = _unpack(_U64, handle)
    (scale,) = _unpack(struct.Struct("<d"), handle)
    distances = read_array(handle, m * m).reshape(m, m)
    _expect_end(handle)
    distances.flags.writeable = False
    return GeodesicMatrix(distances=distances, scale=scale)


def write_codebook(handle: IO[bytes], codebook: Codebook) -> None:
    """p, k, alpha, seed, column-major centers, per-cluster stats, training hash."""
    write_header(handle, EntryKind.CODEBOOK.magic, FORMAT_VERSION)
    handle.write(_CODEBOOK_META.pack(codebook.dimension, codebook.k, codebook.alpha, codebook.seed))
    handle.write(codebook.centers.astype("<f8").tobytes(order="F"))
    handle.write(codebook.stats.counts.astype("<u8").tobytes())
    handle.write(codebook.stats.mean_distances.astype("<f8").tobytes())
    handle.write(struct.pack("<d", codebook.stats.inertia))
    encoded = codebook.training_hash.encode("ascii")
    handle.write(struct.pack("<I", len(encoded)))
    handle.write(encoded)


def read_codebook(handle: IO[bytes]) -> Codebook:
    read_header(handle, EntryKind.CODEBOOK.magic, FORMAT_VERSION)
    p, k, alpha, seed = _unpack(_CODEBOOK_META, handle)
    centers = read_array(handle, p * k).reshape((p, k), order="F")
    counts = read_array(handle, k, "<u8").astype(np.int64)
    mean_distances = read_array(handle, k)
    (inertia,) = _unpack(struct.Struct("<d"), handle)
    (length,) = _unpack(struct.Struct("<I"), handle)
    training_hash = handle.read(length).decode("ascii")
    _expect_end(handle)
    return Codebook(
        centers=centers,
        alpha=alpha,
        seed=seed,
        stats=ClusterStats(counts=counts, mean_distances=mean_distances, inertia=inertia),
        training_hash=training_hash,
    )


_CODECS: dict[EntryKind, tuple[Callable[[IO[bytes], Any], None], Callable[[IO[bytes]], Any]]] = {
    EntryKind.EIGENBASIS: (write_eigenbasis, read_eigenbasis),
    EntryKind.SIGNATURES: (write_signatures, read_signatures),
    EntryKind.GEODESICS: (write_geodesics, read_geodesics),
    EntryKind.CODEBOOK: (write_codebook, read_codebook),
}


@dataclass
class StoreStats:
    hits: int = 0
    misses: int = 0
    computed: Counter = field(default_factory=Counter)

    def merge(self, other: StoreStats) -> None:
        self.hits += other.hits
        self.misses += other.misses
        self.computed.update(other.computed)

    def as_dict(self) -> dict[str, int]:
        counters = {"cache_hits": self.hits, "cache_misses": self.misses}
        counters.update({f"{kind}_computed": n for kind, n in sorted(self.computed.items())})
        return counters


class DescriptorStore:
    """
    Content-addressed binary cache.

    Unreadable entries (bad magic, version or shape) are logged, counted as a
    miss and recomputed.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root).expanduser()
        self.stats = StoreStats()

    def path_for(self, kind: EntryKind, content_hash: str, params: dict | None = None) -> Path:
        suffix = f"-{hash_params(**params)}" if params else ""
        return self.root / kind.value / content_hash[:2] / f"{content_hash}{suffix}.bin"

    def get_or_compute(
        self,
        kind: EntryKind,
        content_hash: str,
        params: dict | None,
        compute: Callable[[], T],
    ) -> T:
        """Return the cached entry, or compute, persist and return it."""
        path = self.path_for(kind, content_hash, params)
        writer, reader = _CODECS[kind]
        if path.exists():
            try:
                with path.open("rb") as handle:
                    value = reader(handle)
                self.stats.hits += 1
                logger.debug(f"Cache HIT for {kind.value} {path.name}")
                return value
            except (CacheFormatError, ValueError) as e:
                logger.warning(f"Discarding unreadable cache entry {path}: {e}")
        else:
            logger.debug(f"Cache MISS for {kind.value} {path.name}")
        self.stats.misses += 1
        value = compute()
        self.stats.computed[kind.value] += 1
        with atomic_write(path, "wb") as handle:
            writer(handle, value)
        return value

    def contains(self, kind: EntryKind, content_hash: str, params: dict | None = None) -> bool:
        return self.path_for(kind, content_hash, params).exists()

    def clear(self) -> int:
        """Delete every entry under the root and return how many were removed."""
        removed = 0
        for kind in EntryKind:
            for path in (self.root / kind.value).rglob("*.bin"):
                path.unlink()
                removed += 1
        logger.info(f"Cleared {removed} cache entries under {self.root}")
        return removed
