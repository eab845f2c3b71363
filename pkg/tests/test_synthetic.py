# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""Tests for the procedural meshes and the synthetic dataset writer."""

import numpy as np
import pytest

from sgwc_bof.models import DatasetManifest
from sgwc_bof.synthetic import (
    SYNTHETIC_CLASSES,
    bumped_sphere,
    icosahedron,
    icosphere,
    make_synthetic_dataset,
    random_rotation,
    rigid_transform,
    subdivide,
    torus,
)


def _euler_characteristic(mesh):
    return mesh.n_vertices - len(mesh.edges) + mesh.n_triangles


def test_icosahedron():
    mesh = icosahedron()
    assert (mesh.n_vertices, mesh.n_triangles) == (12, 20)
    np.testing.assert_allclose(np.linalg.norm(mesh.vertices, axis=1), 1.0)
    assert _euler_characteristic(mesh) == 2


@pytest.mark.parametrize("subdivisions", [0, 1, 2, 3])
def test_icosphere_counts(subdivisions):
    mesh = icosphere(subdivisions, radius=2.0)
    assert mesh.n_vertices == 10 * 4**subdivisions + 2
    assert _euler_characteristic(mesh) == 2
    np.testing.assert_allclose(np.linalg.norm(mesh.vertices, axis=1), 2.0)
    assert mesh.is_connected()


def test_subdivide_keeps_original_vertices():
    mesh = icosahedron()
    refined = subdivide(mesh)
    np.testing.assert_array_equal(refined.vertices[:12], mesh.vertices)
    assert refined.n_triangles == 4 * mesh.n_triangles


def test_torus_is_closed_genus_one():
    mesh = torus(n_major=20, n_minor=10)
    assert mesh.n_vertices == 200
    assert _euler_characteristic(mesh) == 0
    assert mesh.is_connected()


def test_torus_radii_validated():
    with pytest.raises(ValueError):
        torus(major_radius=1.0, minor_radius=1.5)


def test_bumped_sphere_pushes_outward(rng):
    mesh = bumped_sphere(rng, subdivisions=2)
    radii = np.linalg.norm(mesh.vertices, axis=1)
    assert np.all(radii >= 1.0 - 1e-12)
    assert radii.max() > 1.1


def test_random_rotation_is_proper(rng):
    for _ in range(5):
        rotation = random_rotation(rng)
        np.testing.assert_allclose(rotation @ rotation.T, np.eye(3), atol=1e-12)
        assert np.linalg.det(rotation) == pytest.approx(1.0)


def test_rigid_transform_preserves_edge_lengths(rng):
    mesh = icosphere(1)
    moved = rigid_transform(mesh, random_rotation(rng), (4.0, -1.0, 2.0))
    np.testing.assert_allclose(moved.edge_lengths(), mesh.edge_lengths(), rtol=1e-12)


def test_dataset_writer(tmp_path):
    manifest_path = make_synthetic_dataset(tmp_path, instances_per_class=2, seed=3, subdivisions=0)
    assert manifest_path == tmp_path / "manifest.csv"
    manifest = DatasetManifest.from_csv(manifest_path)
    assert len(manifest) == 2 * len(SYNTHETIC_CLASSES)
    assert manifest.class_names == sorted(SYNTHETIC_CLASSES)
    assert all(entry.path.is_file() for entry in manifest.entries)
    assert (tmp_path / "torus" / "torus_01.off").is_file()


def test_dataset_writer_is_deterministic(tmp_path):
    make_synthetic_dataset(tmp_path / "a", instances_per_class=2, seed=3, subdivisions=0)
    make_synthetic_dataset(tmp_path / "b", instances_per_class=2, seed=3, subdivisions=0)
    for name in ("sphere/sphere_00.off", "bumpy/bumpy_01.off"):
        assert (tmp_path / "a" / name).read_text() == (tmp_path / "b" / name).read_text()


def test_dataset_needs_two_instances(tmp_path):
    with pytest.raises(ValueError, match="instances_per_class"):
        make_synthetic_dataset(tmp_path, instances_per_class=1)
