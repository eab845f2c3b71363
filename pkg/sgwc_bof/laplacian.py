# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""
Cotangent Laplace-Beltrami operator, its truncated generalized eigenbasis,
and the graph Fourier transform over that basis.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from sgwc_bof.mesh import Mesh, cotangent_weights, vertex_areas

logger = logging.getLogger(__name__)

#: Eigenpairs retained by default, capped at m - 1 on small meshes.
DEFAULT_EIGEN_COUNT = 201
#: Shift for shift-invert; just below the singular zero mode.
SHIFT = -1e-8
#: Zero areas are floored to this fraction of the mean vertex area.
AREA_FLOOR = 1e-12
RESIDUAL_TOLERANCE = 1e-6
ORTHONORMALITY_TOLERANCE = 1e-6
#: Entries below this magnitude are skipped when fixing eigenfunction signs.
SIGN_THRESHOLD = 1e-8


class EigenSolveError(RuntimeError):
    """Raised when the eigensolver does not converge."""

    def __init__(self, message: str, residuals: np.ndarray | None = None):
        self.residuals = residuals
        super().__init__(message)


@dataclass(frozen=True)
class LaplacianPair:
    """Stiffness matrix W and diagonal mass matrix A of the discrete LBO."""

    stiffness: sparse.csr_matrix
    mass: sparse.dia_matrix

    @property
    def areas(self) -> np.ndarray:
        return self.mass.diagonal()

    @property
    def n_vertices(self) -> int:
        return int(self.stiffness.shape[0])


@dataclass(frozen=True)
class EigenBasis:
    """Truncated A-orthonormal eigenpairs, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray
    vertex_areas: np.ndarray

    def __post_init__(self):
        for name in ("eigenvalues", "eigenfunctions", "vertex_areas"):
            array = np.array(getattr(self, name), dtype=np.float64, copy=True)
            array.flags.writeable = False
            object.__setattr__(self, name, array)
        m, q = self.eigenfunctions.shape
        if self.eigenvalues.shape != (q,) or self.vertex_areas.shape != (m,):
            raise ValueError(
                f"Inconsistent basis shapes: eigenvalues {self.eigenvalues.shape}, "
                f"eigenfunctions {self.eigenfunctions.shape}, areas {self.vertex_areas.shape}"
            )

    @property
    def count(self) -> int:
        return int(self.eigenvalues.shape[0])

    @property
    def n_vertices(self) -> int:
        return int(self.eigenfunctions.shape[0])

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    def truncate(self, q: int) -> EigenBasis:
        """The first *q* eigenpairs."""
        if not 1 <= q <= self.count:
            raise ValueError(f"q must be in [1, {self.count}], got {q}")
        return EigenBasis(self.eigenvalues[:q], self.eigenfunctions[:, :q], self.vertex_areas)

    def orthonormality_error(self) -> float:
        """max |<phi_k, phi_l>_A - delta_kl| over computed pairs."""
        phi = self.eigenfunctions
        gram = phi.T @ (self.vertex_areas[:, None] * phi)
        return float(np.abs(gram - np.eye(self.count)).max())

    def residuals(self, pair: LaplacianPair) -> np.ndarray:
        """Relative residuals ||W phi - lambda A phi|| / max(1, ||W phi||)."""
        w_phi = pair.stiffness @ self.eigenfunctions
        a_phi = self.vertex_areas[:, None] * self.eigenfunctions
        absolute = np.linalg.norm(w_phi - a_phi * self.eigenvalues[None, :], axis=0)
        return absolute / np.maximum(1.0, np.linalg.norm(w_phi, axis=0))


def default_eigen_count(m: int) -> int:
    return min(DEFAULT_EIGEN_COUNT, m - 1)


def assemble(mesh: Mesh) -> LaplacianPair:
    """Assemble W = diag(sum_k c_ik) - (c_ij) and A = diag(a_i)."""
    weights = cotangent_weights(mesh)
    degree = np.asarray(weights.sum(axis=1)).ravel()
    stiffness = (sparse.diags(degree) - weights).tocsr()

    areas = vertex_areas(mesh)
    mean_area = areas.mean()
    if mean_area <= 0.0:
        raise ValueError(f"{mesh!r} has zero total area; the mass matrix is singular.")
    floor = AREA_FLOOR * mean_area
    n_floored = int((areas < floor).sum())
    if n_floored:
        logger.warning(f"Floored {n_floored} vertex area(s) of {mesh!r} to {floor:.3e}")
    areas = np.maximum(areas, floor)
    return LaplacianPair(stiffness=stiffness, mass=sparse.diags(areas, format="dia"))


def _fix_signs(phi: np.ndarray) -> np.ndarray:
    """Make the first significantly nonzero entry of every column positive."""
    significant = np.abs(phi) > SIGN_THRESHOLD
    first = np.argmax(significant, axis=0)
    signs = np.sign(phi[first, np.arange(phi.shape[1])])
    signs[signs == 0] = 1.0
    return phi * signs[None, :]


def _a_orthonormalize(phi: np.ndarray, areas: np.ndarray) -> np.ndarray:
    """Re-orthonormalize columns in the A inner product (Cholesky of the Gram matrix)."""
    gram = phi.T @ (areas[:, None] * phi)
    gram = 0.5 * (gram + gram.T)
    chol = np.linalg.cholesky(gram)
    return scipy.linalg.solve_triangular(chol, phi.T, lower=True).T


def solve_eigs(
    pair: LaplacianPair,
    q: int | None = None,
    *,
    seed: int = 0,
    tol: float = 0.0,
    max_iter: int | None = None,
) -> EigenBasis:
    """The q smallest eigenpairs of W phi = lambda A phi.

    Uses shift-invert Lanczos (ARPACK) around a tiny negative shift with a
    seeded start vector. ``q == m`` falls back to a dense generalized solve.

    Raises:
        ValueError: When q is outside [1, m].
        EigenSolveError: When ARPACK does not converge; carries the residuals reached.
    """
    m = pair.n_vertices
    if q is None:
        q = default_eigen_count(m)
    if not 1 <= q <= m:
        raise ValueError(f"Eigen count q must be in [1, {m}] for a mesh of {m} vertices, got {q}")
    areas = pair.areas

    if q == m:
        eigenvalues, phi = scipy.linalg.eigh(pair.stiffness.toarray(), np.diag(areas))
        eigenvalues, phi = eigenvalues[:q], phi[:, :q]
    else:
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(m)
        try:
            eigenvalues, phi = eigsh(
                pair.stiffness.tocsc(),
                k=q,
                M=pair.mass.tocsc(),
                sigma=SHIFT,
                which="LM",
                v0=v0,
                tol=tol,
                maxiter=max_iter,
            )
        except ArpackNoConvergence as e:
            partial = EigenBasis(e.eigenvalues, e.eigenvectors, areas) if len(e.eigenvalues) else None
            residuals = partial.residuals(pair) if partial is not None else None
            raise EigenSolveError(
                f"Eigensolver did not converge for q={q}: {len(e.eigenvalues)} pairs converged",
                residuals=residuals,
            ) from e

    order = np.argsort(eigenvalues, kind="stable")
    eigenvalues = np.maximum(eigenvalues[order], 0.0)
    phi = _fix_signs(_a_orthonormalize(phi[:, order], areas))
    basis = EigenBasis(eigenvalues, phi, areas)

    residual = float(basis.residuals(pair).max())
    ortho = basis.orthonormality_error()
    logger.debug(f"Solved {q} eigenpairs (m={m}): max residual {residual:.2e}, A-orth {ortho:.2e}")
    if residual > RESIDUAL_TOLERANCE or ortho > ORTHONORMALITY_TOLERANCE:
        logger.warning(
            f"Eigenbasis above tolerance (residual {residual:.2e}, orthonormality {ortho:.2e})"
        )
    return basis


def gft(basis: EigenBasis, f: np.ndarray) -> np.ndarray:
    """Forward graph Fourier transform, f_hat = Phi^T A f."""
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (basis.n_vertices,):
        raise ValueError(f"Signal length {f.shape} does not match {basis.n_vertices} vertices")
    return basis.eigenfunctions.T @ (basis.vertex_areas * f)


def igft(basis: EigenBasis, fhat: np.ndarray) -> np.ndarray:
    """Inverse graph Fourier transform, f = Phi f_hat."""
    fhat = np.asarray(fhat, dtype=np.float64)
    if fhat.shape != (basis.count,):
        raise ValueError(f"Spectrum length {fhat.shape} does not match {basis.count} eigenpairs")
    return basis.eigenfunctions @ fhat
