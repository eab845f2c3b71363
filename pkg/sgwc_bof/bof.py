# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""
Bag-of-features machinery: K-means vocabulary, soft-assignment coding and pooling.

Descriptors are stored column-wise (p x N), matching the signature matrices.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.cluster.vq import vq
from scipy.spatial.distance import cdist

logger = logging.getLogger(__name__)

DEFAULT_VOCABULARY_SIZE = 128
DEFAULT_RESTARTS = 5
DEFAULT_MAX_ITER = 100
DEFAULT_TOL = 1e-9


class AlphaMode(str, Enum):
    """How the "size" of a cluster is read when setting the softness alpha."""

    DISTANCE = "distance"
    COUNT = "count"


class DegenerateVocabularyError(ValueError):
    """Raised when every cluster has zero spread, so alpha is undefined."""


@dataclass(frozen=True)
class ClusterStats:
    counts: np.ndarray
    mean_distances: np.ndarray
    inertia: float


@dataclass(frozen=True)
class Codebook:
    """p x k vocabulary with its softness parameter."""

    centers: np.ndarray
    alpha: float
    seed: int
    stats: ClusterStats
    training_hash: str = field(default="")

    def __post_init__(self):
        if self.centers.ndim != 2 or self.centers.shape[1] < 1:
            raise ValueError(f"centers must be p x k with k >= 1, got {self.centers.shape}")
        if not np.all(np.isfinite(self.centers)):
            raise ValueError("codebook centers must be finite")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    @property
    def k(self) -> int:
        return int(self.centers.shape[1])

    @property
    def dimension(self) -> int:
        return int(self.centers.shape[0])


@dataclass(frozen=True)
class CodeMatrix:
    """k x m soft assignments; every column is a probability vector."""

    codes: np.ndarray

    @property
    def k(self) -> int:
        return int(self.codes.shape[0])

    @property
    def n_descriptors(self) -> int:
        return int(self.codes.shape[1])


def compute_alpha(stats: ClusterStats, mode: AlphaMode | str = AlphaMode.DISTANCE) -> float:
    """alpha = 1 / (8 mu^2) with mu the median cluster size.

    In ``distance`` mode mu is the median over clusters of the mean member-to-center
    distance; ``count`` mode uses the median member count instead.
    """
    mode = AlphaMode(mode)
    sizes = stats.mean_distances if mode is AlphaMode.DISTANCE else stats.counts.astype(float)
    mu = float(np.median(sizes))
    if mu <= 0.0:
        raise DegenerateVocabularyError(
            "Median cluster size is zero (all descriptors coincide with their centers); "
            "alpha = 1/(8 mu^2) is undefined."
        )
    return 1.0 / (8.0 * mu * mu)


def _plus_plus_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding over row-wise points."""
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    closest = cdist(points, centers[:1], "sqeuclidean").ravel()
    for c in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            index = rng.integers(n)
        else:
            index = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
            index = min(index, n - 1)
        centers[c] = points[index]
        np.minimum(closest, cdist(points, centers[c : c + 1], "sqeuclidean").ravel(), out=closest)
    return centers


def _lloyd(
    points: np.ndarray, centers: np.ndarray, max_iter: int, tol: float
) -> tuple[np.ndarray, np.ndarray, float, int]:
    """Lloyd iterations; empty clusters move to the point farthest from its center."""
    k = centers.shape[0]
    labels, distances = vq(points, centers, check_finite=False)
    for iteration in range(1, max_iter + 1):
        updated = np.zeros_like(centers)
        np.add.at(updated, labels, points)
        counts = np.bincount(labels, minlength=k)
        filled = counts > 0
        updated[filled] /= counts[filled, None]
        if not filled.all():
            farthest = np.argsort(distances, kind="stable")[::-1]
            for slot, point_index in zip(np.flatnonzero(~filled), farthest, strict=False):
                updated[slot] = points[point_index]
            logger.debug(f"Re-seeded {int((~filled).sum())} empty cluster(s)")
        shift = float(np.max(np.linalg.norm(updated - centers, axis=1)))
        centers = updated
        labels, distances = vq(points, centers, check_finite=False)
        if shift < tol:
            break
    inertia = float(np.sum(np.square(distances)))
    return centers, labels, inertia, iteration


def kmeans(
    data: np.ndarray,
    k: int,
    seed: int = 0,
    *,
    restarts: int = DEFAULT_RESTARTS,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    alpha: float | None = None,
    alpha_mode: AlphaMode | str = AlphaMode.DISTANCE,
    training_hash: str = "",
) -> Codebook:
    """Train a k-word vocabulary on the columns of a p x N matrix.

    k-means++ seeding from *seed*, Lloyd iterations until no center moves by
    *tol* or *max_iter* passes, best of *restarts* by within-cluster sum of squares.
    ``alpha`` overrides :func:`compute_alpha`.

    Raises:
        ValueError: When N < k, k < 1 or the data is not finite.
        DegenerateVocabularyError: When alpha cannot be derived from the clusters.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError(f"data must be a p x N matrix, got shape {data.shape}")
    n = data.shape[1]
    if k < 1:
        raise ValueError(f"vocabulary size must be >= 1, got {k}")
    if n < k:
        raise ValueError(f"Cannot build {k} clusters from {n} descriptors")
    if not np.all(np.isfinite(data)):
        raise ValueError("K-means data contains non-finite values")

    points = np.ascontiguousarray(data.T)
    rng = np.random.default_rng(seed)
    best: tuple[np.ndarray, np.ndarray, float] | None = None
    for restart in range(max(restarts, 1)):
        init = _plus_plus_init(points, k, rng)
        centers, labels, inertia, iterations = _lloyd(points, init, max_iter, tol)
        logger.debug(f"k-means restart {restart}: inertia {inertia:.6g} after {iterations} passes")
        if best is None or inertia < best[2]:
            best = (centers, labels, inertia)
    centers, labels, inertia = best

    distances = np.linalg.norm(points - centers[labels], axis=1)
    counts = np.bincount(labels, minlength=k)
    sums = np.bincount(labels, weights=distances, minlength=k)
    mean_distances = np.divide(sums, counts, out=np.zeros(k), where=counts > 0)
    stats = ClusterStats(counts=counts, mean_distances=mean_distances, inertia=inertia)
    if alpha is None:
        alpha = compute_alpha(stats, alpha_mode)
    logger.info(f"Vocabulary of {k} words from {n} descriptors: inertia {inertia:.6g}, alpha {alpha:.6g}")
    return Codebook(
        centers=np.ascontiguousarray(centers.T),
        alpha=alpha,
        seed=seed,
        stats=stats,
        training_hash=training_hash,
    )


def soft_assign(signatures: np.ndarray, codebook: Codebook) -> CodeMatrix:
    """u_ri = exp(-alpha ||s_i - v_r||^2) / sum_l exp(-alpha ||s_i - v_l||^2).

    The exponent is shifted by its column maximum so the denominator never underflows.
    """
    signatures = np.asarray(signatures, dtype=np.float64)
    if signatures.ndim != 2 or signatures.shape[0] != codebook.dimension:
        raise ValueError(
            f"Signatures of shape {signatures.shape} do not match a codebook of "
            f"dimension {codebook.dimension}"
        )
    logits = -codebook.alpha * cdist(signatures.T, codebook.centers.T, "sqeuclidean")
    logits -= logits.max(axis=1, keepdims=True)
    weights = np.exp(logits)
    weights /= weights.sum(axis=1, keepdims=True)
    return CodeMatrix(codes=np.ascontiguousarray(weights.T))


def pool_histogram(codes: CodeMatrix) -> np.ndarray:
    """h = U 1_m, the per-codeword column sums."""
    if codes.n_descriptors == 0:
        raise ValueError("Cannot pool an empty code matrix")
    return codes.codes.sum(axis=1)
