# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""
Spectral graph wavelets on meshes.

The wavelet generating kernel g is a band-pass Mexican hat, g(x) = x e^{-x};
the scaling kernel h is a low-pass bump matched to g's peak. A
:class:`KernelBank` holds the scale grid for every resolution level, and
:func:`sgws_matrix` stacks the per-level wavelet and scaling coefficients of
vertex impulses into the multiresolution signature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from sgwc_bof.laplacian import EigenBasis, gft

#: lambda_min = lambda_max / LAMBDA_RATIO
LAMBDA_RATIO = 20.0
#: Coarsest and finest scales are SCALE_NUMERATOR / lambda_min and SCALE_NUMERATOR / lambda_max.
SCALE_NUMERATOR = 2.0
#: max over x >= 0 of x e^{-x}, reached at x = 1.
KERNEL_G_MAX = math.exp(-1.0)
FRAME_GRID_POINTS = 1000


def kernel_g(x):
    """Mexican hat generating kernel g(x) = x exp(-x); g(0) = 0 and g vanishes at infinity."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0):
        raise ValueError("kernel_g is defined for x >= 0")
    return x * np.exp(-x)


def kernel_h(x, lambda_min: float, gamma: float = KERNEL_G_MAX):
    """Scaling kernel h(x) = gamma exp(-(x / (0.6 lambda_min))^4)."""
    if lambda_min <= 0:
        raise ValueError(f"lambda_min must be positive, got {lambda_min}")
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0):
        raise ValueError("kernel_h is defined for x >= 0")
    return gamma * np.exp(-((x / (0.6 * lambda_min)) ** 4))


def signature_dimension(resolution: int) -> int:
    """Rows of a signature at resolution R: (R+1)(R+2)/2 - 1."""
    return (resolution + 1) * (resolution + 2) // 2 - 1


@dataclass(frozen=True)
class KernelBank:
    """Scale grids for levels 1..R, in units of 1/eigenvalue."""

    resolution: int
    lambda_max: float
    lambda_min: float
    scales: tuple[np.ndarray, ...]
    gamma: float = KERNEL_G_MAX

    def level_scales(self, level: int) -> np.ndarray:
        """Strictly decreasing scales t_1 > ... > t_L of one level."""
        if not 1 <= level <= self.resolution:
            raise ValueError(f"level must be in [1, {self.resolution}], got {level}")
        return self.scales[level - 1]

    @property
    def dimension(self) -> int:
        return signature_dimension(self.resolution)

    def h(self, x):
        return kernel_h(x, self.lambda_min, self.gamma)


def build_kernel_bank(lambda_max: float, resolution: int) -> KernelBank:
    """Log-equispaced scales from 2/lambda_min down to 2/lambda_max for every level.

    A single-scale level takes the fine endpoint 2/lambda_max.
    """
    if lambda_max <= 0:
        raise ValueError(f"lambda_max must be positive, got {lambda_max}")
    if resolution < 1:
        raise ValueError(f"resolution must be >= 1, got {resolution}")
    lambda_min = lambda_max / LAMBDA_RATIO
    t_coarse = SCALE_NUMERATOR / lambda_min
    t_fine = SCALE_NUMERATOR / lambda_max
    scales = []
    for level in range(1, resolution + 1):
        if level == 1:
            grid = np.array([t_fine])
        else:
            grid = np.geomspace(t_coarse, t_fine, level)
        grid.flags.writeable = False
        scales.append(grid)
    return KernelBank(
        resolution=resolution,
        lambda_max=float(lambda_max),
        lambda_min=float(lambda_min),
        scales=tuple(scales),
    )


def _check_signal(basis: EigenBasis, f) -> np.ndarray:
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (basis.n_vertices,):
        raise ValueError(f"Signal length {f.shape} does not match {basis.n_vertices} vertices")
    return f


def wavelet_coefficients(basis: EigenBasis, f, t: float) -> np.ndarray:
    """W_f(t, j) = sum_l a_j g(t lambda_l) f_hat(l) phi_l(j)."""
    if t <= 0:
        raise ValueError(f"scale t must be positive, got {t}")
    fhat = gft(basis, _check_signal(basis, f))
    filtered = kernel_g(t * basis.eigenvalues) * fhat
    return basis.vertex_areas * (basis.eigenfunctions @ filtered)


def scaling_coefficients(basis: EigenBasis, f, bank: KernelBank) -> np.ndarray:
    """S_f(j) = sum_l a_j h(lambda_l) f_hat(l) phi_l(j)."""
    fhat = gft(basis, _check_signal(basis, f))
    filtered = bank.h(basis.eigenvalues) * fhat
    return basis.vertex_areas * (basis.eigenfunctions @ filtered)


@dataclass(frozen=True)
class SGWSMatrix:
    """p x m multiresolution signature; column j describes vertex j."""

    values: np.ndarray
    resolution: int

    @property
    def dimension(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_vertices(self) -> int:
        return int(self.values.shape[1])


def impulse_responses(basis: EigenBasis, spectral_filter: np.ndarray) -> np.ndarray:
    """Coefficients of every vertex impulse under a spectral filter.

    For delta_j the coefficient at j is a_j^2 sum_l filter(l) phi_l(j)^2.
    """
    squared = np.square(basis.eigenfunctions)
    return np.square(basis.vertex_areas) * (squared @ spectral_filter)


def sgws_matrix(basis: EigenBasis, resolution: int, bank: KernelBank | None = None) -> SGWSMatrix:
    """Spectral graph wavelet signature of every vertex.

    Rows are ordered level by level: the level-L block holds the L wavelet
    coefficients (coarse to fine) followed by the scaling coefficient.
    """
    if bank is None:
        bank = build_kernel_bank(basis.lambda_max, resolution)
    elif bank.resolution != resolution:
        raise ValueError(f"Kernel bank resolution {bank.resolution} != {resolution}")

    scaling_row = impulse_responses(basis, bank.h(basis.eigenvalues))
    rows = []
    for level in range(1, resolution + 1):
        for t in bank.level_scales(level):
            rows.append(impulse_responses(basis, kernel_g(t * basis.eigenvalues)))
        rows.append(scaling_row)
    return SGWSMatrix(values=np.vstack(rows), resolution=resolution)


def frame_diagnostic(
    bank: KernelBank, level: int, lambda_max: float, n_points: int = FRAME_GRID_POINTS
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Sample G(lambda) = h(lambda)^2 + sum_k g(t_k lambda)^2 on a uniform grid.

    Returns:
        (grid, G, h2, g2) with g2 of shape (n_points, L).
    """
    grid = np.linspace(0.0, lambda_max, n_points)
    h2 = np.square(bank.h(grid))
    scales = bank.level_scales(level)
    g2 = np.square(kernel_g(np.outer(grid, scales)))
    return grid, h2 + g2.sum(axis=1), h2, g2


def frame_bounds(
    bank: KernelBank, level: int, lambda_max: float, n_points: int = FRAME_GRID_POINTS
) -> tuple[float, float]:
    """Lower and upper frame bounds (min and max of G over [0, lambda_max])."""
    _, G, _, _ = frame_diagnostic(bank, level, lambda_max, n_points)
    return float(G.min()), float(G.max())
