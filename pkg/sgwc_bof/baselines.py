# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""Baseline spectral descriptors: HKS, WKS, Shape-DNA, compact Shape-DNA and GPS embedding."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from sgwc_bof.laplacian import EigenBasis

#: Eigenvalues at or below this are treated as the zero mode.
ZERO_EIGENVALUE = 1e-12
SHAPE_DNA_LENGTH = 10
CSHAPE_DNA_LENGTH = 33
CSHAPE_DNA_WINDOW = 64
GPS_LENGTH = 10
#: WKS variance in units of the log-energy grid spacing.
WKS_SIGMA_STEPS = 7.0


class SignatureKind(str, Enum):
    HKS = "hks"
    WKS = "wks"


class SpectralVectorKind(str, Enum):
    SHAPE_DNA = "shape-dna"
    CSHAPE_DNA = "cshape-dna"
    GPS_EMBEDDING = "gps-embedding"


@dataclass(frozen=True)
class PointSignatureBank:
    """p x m point signatures, one row per scale or energy."""

    values: np.ndarray
    scales: np.ndarray
    kind: SignatureKind


@dataclass(frozen=True)
class GlobalSpectralVector:
    values: np.ndarray
    kind: SpectralVectorKind


def hks(basis: EigenBasis, scales) -> PointSignatureBank:
    """Heat kernel signature sum_l exp(-lambda_l t_k) phi_l(j)^2 over the computed pairs."""
    scales = np.asarray(scales, dtype=np.float64)
    if scales.size == 0:
        raise ValueError("HKS needs at least one time scale")
    if np.any(scales <= 0) or np.any(np.diff(scales) <= 0):
        raise ValueError("HKS time scales must be positive and ascending")
    time_term = np.exp(-np.outer(scales, basis.eigenvalues))
    values = time_term @ np.square(basis.eigenfunctions).T
    return PointSignatureBank(values=values, scales=scales, kind=SignatureKind.HKS)


def wks(basis: EigenBasis, energies, sigma: float) -> PointSignatureBank:
    """Wave kernel signature with per-energy normalization C_t = 1 / sum_l w_l(t)."""
    energies = np.asarray(energies, dtype=np.float64)
    if energies.size == 0:
        raise ValueError("WKS needs at least one energy")
    if np.any(energies <= 0):
        raise ValueError("WKS energies must be positive")
    if sigma <= 0:
        raise ValueError(f"WKS sigma must be positive, got {sigma}")
    keep = basis.eigenvalues > ZERO_EIGENVALUE
    if not keep.any():
        raise ValueError("WKS is undefined when every eigenvalue is zero")
    log_lambda = np.log(basis.eigenvalues[keep])
    weights = np.exp(-np.square(np.log(energies)[:, None] - log_lambda[None, :]) / sigma**2)
    weights /= weights.sum(axis=1, keepdims=True)
    values = weights @ np.square(basis.eigenfunctions[:, keep]).T
    return PointSignatureBank(values=values, scales=energies, kind=SignatureKind.WKS)


def _nonzero_eigenvalues(basis: EigenBasis) -> np.ndarray:
    return basis.eigenvalues[1:]


def default_hks_scales(basis: EigenBasis, p: int) -> np.ndarray:
    """p log-spaced times over [4 ln 10 / lambda_q, 4 ln 10 / lambda_2]."""
    nonzero = _nonzero_eigenvalues(basis)
    if nonzero.size == 0 or nonzero[0] <= ZERO_EIGENVALUE:
        raise ValueError("HKS scale grid needs at least one nonzero eigenvalue")
    return np.geomspace(4 * math.log(10) / nonzero[-1], 4 * math.log(10) / nonzero[0], p)


def default_wks_energies(basis: EigenBasis, p: int) -> tuple[np.ndarray, float]:
    """p log-equispaced energies over [lambda_2, lambda_q] and sigma = 7 grid steps."""
    nonzero = _nonzero_eigenvalues(basis)
    nonzero = nonzero[nonzero > ZERO_EIGENVALUE]
    if nonzero.size < 2:
        raise ValueError("WKS energy grid needs at least two nonzero eigenvalues")
    log_grid = np.linspace(math.log(nonzero[0]), math.log(nonzero[-1]), p)
    step = (log_grid[-1] - log_grid[0]) / max(p - 1, 1)
    return np.exp(log_grid), WKS_SIGMA_STEPS * step


def _require(basis: EigenBasis, needed: int, what: str) -> None:
    if basis.count < needed:
        raise ValueError(f"{what} needs {needed} eigenpairs, the basis has {basis.count}")


def shape_dna(basis: EigenBasis, d: int = SHAPE_DNA_LENGTH) -> GlobalSpectralVector:
    """(lambda_2, ..., lambda_{d+1}); the zero mode is skipped."""
    _require(basis, d + 1, "Shape-DNA")
    return GlobalSpectralVector(basis.eigenvalues[1 : d + 1].copy(), SpectralVectorKind.SHAPE_DNA)


def spectrum_dft_magnitudes(values, d: int) -> np.ndarray:
    """Magnitudes of the first d discrete Fourier coefficients of a sequence."""
    values = np.asarray(values, dtype=np.float64)
    if d > values.size:
        raise ValueError(f"Cannot keep {d} coefficients of a length-{values.size} transform")
    return np.abs(np.fft.fft(values))[:d]


def cshape_dna(
    basis: EigenBasis,
    total_area: float,
    d: int = CSHAPE_DNA_LENGTH,
    window: int = CSHAPE_DNA_WINDOW,
) -> GlobalSpectralVector:
    """Compact Shape-DNA: DFT magnitudes of area-normalized eigenvalues lambda_2..lambda_{window+1}.

    The zero mode lambda_1 is skipped, so the basis needs ``window + 1`` eigenpairs
    (65 at the default window of 64), one more than the window itself.

    Raises:
        ValueError: When the basis holds fewer than ``window + 1`` eigenpairs.
    """
    _require(basis, window + 1, "cShape-DNA")
    normalized = total_area * basis.eigenvalues[1 : window + 1]
    return GlobalSpectralVector(
        spectrum_dft_magnitudes(normalized, d), SpectralVectorKind.CSHAPE_DNA
    )


def gps_embedding(
    basis: EigenBasis, total_area: float, d: int = GPS_LENGTH
) -> GlobalSpectralVector:
    """1 / sqrt(area * lambda_l) for l = 2..d+1."""
    _require(basis, d + 1, "GPS embedding")
    nonzero = basis.eigenvalues[1 : d + 1]
    if np.any(nonzero <= ZERO_EIGENVALUE):
        raise ValueError("GPS embedding is undefined for a disconnected mesh (repeated zero mode)")
    return GlobalSpectralVector(
        1.0 / np.sqrt(total_area * nonzero), SpectralVectorKind.GPS_EMBEDDING
    )
