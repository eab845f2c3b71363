# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""Tests for LBO assembly, the truncated eigenbasis and the graph Fourier transform."""

import numpy as np
import pytest
import scipy.linalg

from sgwc_bof.laplacian import (
    EigenBasis,
    assemble,
    default_eigen_count,
    gft,
    igft,
    solve_eigs,
)
from sgwc_bof.mesh import Mesh
from sgwc_bof.synthetic import (
    bumped_sphere,
    icosahedron,
    icosphere,
    jitter,
    random_rotation,
    rigid_transform,
    torus,
)

SMALL_MESHES = {
    "icosahedron": lambda rng: icosahedron(),
    "icosphere-42": lambda rng: icosphere(1),
    "icosphere-162": lambda rng: icosphere(2),
    "torus-72": lambda rng: torus(n_major=12, n_minor=6),
    "bumped-162": lambda rng: bumped_sphere(rng, subdivisions=2),
    "jittered-162": lambda rng: jitter(icosphere(2), 0.01, rng),
}


class TestAssemble:
    def test_rows_sum_to_zero(self, sphere42):
        pair = assemble(sphere42)
        np.testing.assert_allclose(np.asarray(pair.stiffness.sum(axis=1)).ravel(), 0.0, atol=1e-9)

    def test_mass_is_positive_and_sums_to_area(self, sphere42):
        pair = assemble(sphere42)
        assert np.all(pair.areas > 0)
        assert pair.areas.sum() == pytest.approx(sphere42.total_area(), rel=1e-9)

    def test_zero_area_mesh_rejected(self, collinear_strip):
        with pytest.raises(ValueError, match="zero total area"):
            assemble(collinear_strip)


class TestSolveEigs:
    def test_matches_dense_generalized_solve(self, sphere42):
        pair = assemble(sphere42)
        basis = solve_eigs(pair, 20)
        dense = scipy.linalg.eigh(pair.stiffness.toarray(), np.diag(pair.areas), eigvals_only=True)
        np.testing.assert_allclose(basis.eigenvalues, dense[:20], rtol=1e-8, atol=1e-10)

    @pytest.mark.parametrize("name", sorted(SMALL_MESHES))
    def test_partial_solve_on_small_meshes(self, name, rng):
        mesh = SMALL_MESHES[name](rng)
        assert mesh.n_vertices <= 200
        pair = assemble(mesh)
        q = min(10, mesh.n_vertices - 3)
        basis = solve_eigs(pair, q)
        dense = scipy.linalg.eigh(pair.stiffness.toarray(), np.diag(pair.areas), eigvals_only=True)
        np.testing.assert_allclose(basis.eigenvalues, dense[:q], rtol=1e-8, atol=1e-10)
        assert basis.orthonormality_error() <= 1e-6
        assert abs(basis.eigenvalues[0]) <= 1e-8 * basis.eigenvalues[-1]

    def test_first_mode_is_constant(self, sphere42):
        pair = assemble(sphere42)
        basis = solve_eigs(pair, 10)
        assert basis.eigenvalues[0] == pytest.approx(0.0, abs=1e-9)
        expected = 1.0 / np.sqrt(pair.areas.sum())
        np.testing.assert_allclose(basis.eigenfunctions[:, 0], expected, rtol=1e-6)

    def test_partial_basis_is_a_orthonormal(self, sphere42):
        basis = solve_eigs(assemble(sphere42), 15)
        assert basis.orthonormality_error() < 1e-8
        assert np.all(np.diff(basis.eigenvalues) >= 0)

    def test_full_basis_is_a_orthonormal(self, ico_basis):
        assert ico_basis.count == ico_basis.n_vertices == 12
        assert ico_basis.orthonormality_error() < 1e-10

    def test_residuals_are_small(self, sphere42):
        pair = assemble(sphere42)
        basis = solve_eigs(pair, 12)
        assert basis.residuals(pair).max() < 1e-8

    def test_deterministic_for_fixed_seed(self, sphere42):
        pair = assemble(sphere42)
        a = solve_eigs(pair, 10, seed=3)
        b = solve_eigs(pair, 10, seed=3)
        np.testing.assert_array_equal(a.eigenvalues, b.eigenvalues)
        np.testing.assert_array_equal(a.eigenfunctions, b.eigenfunctions)

    def test_uniform_scaling_law(self, ico, dense_basis):
        scaled = Mesh(ico.vertices * 3.0, ico.triangles)
        original = dense_basis(ico).eigenvalues
        np.testing.assert_allclose(dense_basis(scaled).eigenvalues[1:], original[1:] / 9.0, rtol=1e-6)

    def test_vertex_permutation_leaves_spectrum(self, sphere42, rng):
        perm = rng.permutation(sphere42.n_vertices)
        inverse = np.argsort(perm)
        permuted = Mesh(sphere42.vertices[perm], inverse[sphere42.triangles])
        a = solve_eigs(assemble(sphere42), 12).eigenvalues
        b = solve_eigs(assemble(permuted), 12).eigenvalues
        np.testing.assert_allclose(a, b, rtol=1e-8, atol=1e-10)

    def test_rigid_motion_leaves_spectrum(self, sphere42, rng):
        moved = rigid_transform(sphere42, random_rotation(rng), (1.0, -2.0, 0.5))
        a = solve_eigs(assemble(sphere42), 12).eigenvalues
        b = solve_eigs(assemble(moved), 12).eigenvalues
        np.testing.assert_allclose(a, b, rtol=1e-8, atol=1e-10)

    @pytest.mark.parametrize("q", [0, 43])
    def test_q_out_of_range(self, sphere42, q):
        with pytest.raises(ValueError, match="Eigen count"):
            solve_eigs(assemble(sphere42), q)

    def test_default_count_capped(self):
        assert default_eigen_count(12) == 11
        assert default_eigen_count(5000) == 201

    def test_truncate(self, ico_basis):
        head = ico_basis.truncate(4)
        assert head.count == 4
        np.testing.assert_array_equal(head.eigenvalues, ico_basis.eigenvalues[:4])
        with pytest.raises(ValueError):
            ico_basis.truncate(13)

    @pytest.mark.timeout(300)
    def test_unit_sphere_spectrum(self):
        """Eigenvalue clusters near l(l+1) = 2, 6, 12 with multiplicities 3, 5, 7."""
        basis = solve_eigs(assemble(icosphere(4)), 16)
        values = basis.eigenvalues
        np.testing.assert_allclose(values[1:4], 2.0, rtol=0.05)
        np.testing.assert_allclose(values[4:9], 6.0, rtol=0.05)
        np.testing.assert_allclose(values[9:16], 12.0, rtol=0.05)


class TestGraphFourierTransform:
    def test_eigenfunction_maps_to_unit_vector(self, sphere42_basis):
        fhat = gft(sphere42_basis, sphere42_basis.eigenfunctions[:, 1])
        expected = np.zeros(sphere42_basis.count)
        expected[1] = 1.0
        np.testing.assert_allclose(fhat, expected, atol=1e-8)

    def test_constant_maps_to_first_coefficient(self, sphere42_basis):
        fhat = gft(sphere42_basis, np.full(sphere42_basis.n_vertices, 2.5))
        assert abs(fhat[0]) > 1.0
        np.testing.assert_allclose(fhat[1:], 0.0, atol=1e-8)

    def test_inverse_with_full_basis(self, sphere42_basis, rng):
        f = rng.standard_normal(sphere42_basis.n_vertices)
        np.testing.assert_allclose(igft(sphere42_basis, gft(sphere42_basis, f)), f, atol=1e-8)

    def test_length_mismatch(self, ico_basis):
        with pytest.raises(ValueError, match="Signal length"):
            gft(ico_basis, np.zeros(5))
        with pytest.raises(ValueError, match="Spectrum length"):
            igft(ico_basis, np.zeros(5))

    def test_inconsistent_basis_shapes(self):
        with pytest.raises(ValueError, match="Inconsistent"):
            EigenBasis(np.zeros(3), np.zeros((4, 2)), np.ones(4))
