# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""Tests for the HKS, WKS, Shape-DNA, cShape-DNA and GPS baselines."""

import math

import numpy as np
import pytest

from sgwc_bof.baselines import (
    cshape_dna,
    default_hks_scales,
    default_wks_energies,
    gps_embedding,
    hks,
    shape_dna,
    spectrum_dft_magnitudes,
    wks,
)
from sgwc_bof.laplacian import EigenBasis
from sgwc_bof.mesh import Mesh
from sgwc_bof.synthetic import random_rotation, rigid_transform


def _single_pair(value=2.0):
    phi = np.array([[0.5], [0.3], [0.2]])
    return EigenBasis(np.array([value]), phi, np.ones(3))


def _scaled(mesh, s):
    return Mesh(mesh.vertices * s, mesh.triangles)


class TestHks:
    def test_single_pair(self):
        basis = _single_pair(2.0)
        values = hks(basis, [0.5]).values
        np.testing.assert_allclose(values[0], math.exp(-1.0) * np.array([0.25, 0.09, 0.04]))

    def test_small_time_sums_squares(self, ico_basis):
        values = hks(ico_basis, [1e-12]).values[0]
        np.testing.assert_allclose(values, np.square(ico_basis.eigenfunctions).sum(axis=1), rtol=1e-9)

    def test_decreasing_in_time(self, sphere42_basis):
        values = hks(sphere42_basis, default_hks_scales(sphere42_basis, 5)).values
        assert values.shape == (5, 42)
        assert np.all(np.diff(values, axis=0) <= 1e-15)

    def test_rigid_motion_invariance(self, sphere42, rng, dense_basis):
        moved = rigid_transform(sphere42, random_rotation(rng), (0.0, 2.0, 0.0))
        a, b = dense_basis(sphere42), dense_basis(moved)
        scales = default_hks_scales(a, 4)
        np.testing.assert_allclose(hks(a, scales).values, hks(b, scales).values, atol=1e-6)

    @pytest.mark.parametrize("scales", [[], [1.0, 0.5], [-1.0]])
    def test_invalid_scales(self, ico_basis, scales):
        with pytest.raises(ValueError):
            hks(ico_basis, scales)


class TestWks:
    def test_single_pair_at_its_energy(self):
        basis = _single_pair(2.0)
        values = wks(basis, [2.0], sigma=0.5).values
        np.testing.assert_allclose(values[0], [0.25, 0.09, 0.04])

    def test_wide_sigma_averages(self, sphere42_basis):
        basis = sphere42_basis
        values = wks(basis, [3.0], sigma=1e6).values[0]
        expected = np.square(basis.eigenfunctions[:, 1:]).mean(axis=1)
        np.testing.assert_allclose(values, expected, rtol=1e-6)

    def test_default_energies(self, sphere42_basis):
        energies, sigma = default_wks_energies(sphere42_basis, 6)
        assert energies.shape == (6,)
        assert energies[0] == pytest.approx(sphere42_basis.eigenvalues[1])
        assert energies[-1] == pytest.approx(sphere42_basis.eigenvalues[-1])
        assert sigma > 0
        assert wks(sphere42_basis, energies, sigma).values.shape == (6, 42)

    def test_all_zero_spectrum(self):
        with pytest.raises(ValueError, match="zero"):
            wks(_single_pair(0.0), [1.0], sigma=1.0)


class TestGlobalVectors:
    def test_shape_dna(self, sphere42_basis):
        vector = shape_dna(sphere42_basis)
        assert vector.values.shape == (10,)
        np.testing.assert_array_equal(vector.values, sphere42_basis.eigenvalues[1:11])
        assert np.all(np.diff(vector.values) >= 0)

    def test_shape_dna_scaling_law(self, sphere42, dense_basis):
        a = shape_dna(dense_basis(sphere42)).values
        b = shape_dna(dense_basis(_scaled(sphere42, 2.0))).values
        np.testing.assert_allclose(b, a / 4.0, rtol=1e-6)

    def test_too_few_pairs(self, ico_basis):
        with pytest.raises(ValueError, match="eigenpairs"):
            shape_dna(ico_basis, d=12)
        with pytest.raises(ValueError, match="eigenpairs"):
            cshape_dna(ico_basis, 1.0)

    def test_cshape_dna_needs_window_plus_one_pairs(self, sphere162, dense_basis):
        full = dense_basis(sphere162)

        def truncated(q):
            return EigenBasis(full.eigenvalues[:q], full.eigenfunctions[:, :q], full.vertex_areas)

        with pytest.raises(ValueError, match="needs 65 eigenpairs, the basis has 64"):
            cshape_dna(truncated(64), sphere162.total_area())
        assert cshape_dna(truncated(65), sphere162.total_area()).values.shape == (33,)

    def test_dft_of_constant(self):
        magnitudes = spectrum_dft_magnitudes(np.full(64, 0.75), 33)
        assert magnitudes.shape == (33,)
        assert magnitudes[0] == pytest.approx(64 * 0.75)
        np.testing.assert_allclose(magnitudes[1:], 0.0, atol=1e-12)

    def test_cshape_dna_scale_invariant(self, sphere162, dense_basis):
        scaled = _scaled(sphere162, 1.7)
        a = cshape_dna(dense_basis(sphere162), sphere162.total_area()).values
        b = cshape_dna(dense_basis(scaled), scaled.total_area()).values
        assert a.shape == (33,)
        np.testing.assert_allclose(b, a, rtol=1e-8, atol=1e-10 * a.max())

    def test_gps_embedding(self, sphere42, sphere42_basis, dense_basis):
        values = gps_embedding(sphere42_basis, sphere42.total_area()).values
        assert values.shape == (10,)
        assert np.all(values > 0)
        assert np.all(np.diff(values) <= 0)
        scaled = _scaled(sphere42, 0.5)
        rescaled = gps_embedding(dense_basis(scaled), scaled.total_area()).values
        np.testing.assert_allclose(rescaled, values, rtol=1e-8)
