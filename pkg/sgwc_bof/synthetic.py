# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""
Procedural meshes: platonic and subdivided spheres, tori, bumped spheres,
and a three-class dataset writer used for end-to-end checks.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path

import numpy as np

from sgwc_bof.mesh import Mesh, save_mesh
from sgwc_bof.models import DatasetManifest, ManifestEntry

logger = logging.getLogger(__name__)

SYNTHETIC_CLASSES = ("sphere", "torus", "bumpy")


def icosahedron() -> Mesh:
    """Regular icosahedron inscribed in the unit sphere (12 vertices, 20 faces)."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    vertices = np.array(
        [
            [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
            [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
            [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
        ],
        dtype=np.float64,
    )  # fmt: skip
    vertices /= np.linalg.norm(vertices, axis=1, keepdims=True)
    triangles = np.array(
        [
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ]
    )  # fmt: skip
    return Mesh(vertices, triangles, name="icosahedron")


def subdivide(mesh: Mesh) -> Mesh:
    """1-to-4 midpoint refinement; original vertices keep their positions and indices."""
    t = mesh.triangles
    corners = np.stack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]], axis=1)
    keys = np.sort(corners, axis=2).reshape(-1, 2)
    unique, inverse = np.unique(keys, axis=0, return_inverse=True)
    midpoints = 0.5 * (mesh.vertices[unique[:, 0]] + mesh.vertices[unique[:, 1]])
    mid = mesh.n_vertices + inverse.reshape(-1, 3)
    ab, bc, ca = mid[:, 0], mid[:, 1], mid[:, 2]
    a, b, c = t[:, 0], t[:, 1], t[:, 2]
    triangles = np.concatenate(
        [
            np.stack([a, ab, ca], axis=1),
            np.stack([b, bc, ab], axis=1),
            np.stack([c, ca, bc], axis=1),
            np.stack([ab, bc, ca], axis=1),
        ]
    )
    return Mesh(np.vstack([mesh.vertices, midpoints]), triangles, name=mesh.name)


def icosphere(subdivisions: int = 3, radius: float = 1.0) -> Mesh:
    """Subdivided icosahedron projected onto a sphere; 10 * 4^s + 2 vertices."""
    if subdivisions < 0:
        raise ValueError(f"subdivisions must be >= 0, got {subdivisions}")
    mesh = icosahedron()
    for _ in range(subdivisions):
        mesh = subdivide(mesh)
    vertices = radius * mesh.vertices / np.linalg.norm(mesh.vertices, axis=1, keepdims=True)
    return Mesh(vertices, mesh.triangles, name=f"icosphere{subdivisions}")


def torus(
    major_radius: float = 1.0,
    minor_radius: float = 0.35,
    n_major: int = 32,
    n_minor: int = 16,
) -> Mesh:
    """Closed torus from an n_major x n_minor periodic grid, two triangles per cell."""
    if not 0 < minor_radius < major_radius:
        raise ValueError("torus radii must satisfy 0 < minor_radius < major_radius")
    if n_major < 3 or n_minor < 3:
        raise ValueError("torus grid needs at least 3 samples in each direction")
    u = 2 * np.pi * np.arange(n_major) / n_major
    v = 2 * np.pi * np.arange(n_minor) / n_minor
    uu, vv = np.meshgrid(u, v, indexing="ij")
    ring = major_radius + minor_radius * np.cos(vv)
    vertices = np.stack(
        [ring * np.cos(uu), ring * np.sin(uu), minor_radius * np.sin(vv)], axis=-1
    ).reshape(-1, 3)

    i, j = np.meshgrid(np.arange(n_major), np.arange(n_minor), indexing="ij")
    i, j = i.ravel(), j.ravel()
    i1, j1 = (i + 1) % n_major, (j + 1) % n_minor
    p00, p10 = i * n_minor + j, i1 * n_minor + j
    p01, p11 = i * n_minor + j1, i1 * n_minor + j1
    triangles = np.concatenate([np.stack([p00, p10, p11], 1), np.stack([p00, p11, p01], 1)])
    return Mesh(vertices, triangles, name="torus")


def bumped_sphere(
    rng: np.random.Generator,
    subdivisions: int = 3,
    n_bumps: int = 6,
    amplitude: float = 0.3,
    width: float = 0.35,
) -> Mesh:
    """Unit icosphere pushed outward by Gaussian bumps around random directions."""
    base = icosphere(subdivisions)
    centers = rng.standard_normal((n_bumps, 3))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    sq_dist = np.square(base.vertices[:, None, :] - centers[None, :, :]).sum(axis=2)
    radial = 1.0 + amplitude * np.exp(-sq_dist / (2 * width**2)).sum(axis=1)
    return Mesh(base.vertices * radial[:, None], base.triangles, name="bumpy")


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniformly distributed 3 x 3 rotation (QR of a Gaussian matrix, det +1)."""
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def rigid_transform(mesh: Mesh, rotation: np.ndarray, translation=(0.0, 0.0, 0.0)) -> Mesh:
    vertices = mesh.vertices @ np.asarray(rotation).T + np.asarray(translation)
    return Mesh(vertices, mesh.triangles, name=mesh.name)


def jitter(mesh: Mesh, sigma: float, rng: np.random.Generator) -> Mesh:
    """Isotropic Gaussian vertex noise with standard deviation *sigma*."""
    noise = sigma * rng.standard_normal(mesh.vertices.shape)
    return Mesh(mesh.vertices + noise, mesh.triangles, name=mesh.name)


def _instance(class_name: str, rng: np.random.Generator, subdivisions: int) -> Mesh:
    if class_name == "sphere":
        mesh = icosphere(subdivisions, radius=rng.uniform(0.8, 1.2))
    elif class_name == "torus":
        mesh = torus(minor_radius=rng.uniform(0.25, 0.45))
    else:
        mesh = bumped_sphere(rng, subdivisions)
    return rigid_transform(mesh, random_rotation(rng), rng.uniform(-1.0, 1.0, size=3))


def make_synthetic_dataset(
    root: str | Path,
    instances_per_class: int = 20,
    seed: int = 0,
    subdivisions: int = 3,
    jitter_sigma: float = 0.005,
) -> Path:
    """Write sphere, torus and bumpy OFF meshes under ``root/<class>/`` and a manifest.

    Returns:
        Path of ``root/manifest.csv``.
    """
    if instances_per_class < 2:
        raise ValueError(f"instances_per_class must be >= 2, got {instances_per_class}")
    root = Path(root)
    rng = np.random.default_rng(seed)
    entries = []
    for class_name in SYNTHETIC_CLASSES:
        for i in range(instances_per_class):
            mesh = jitter(_instance(class_name, rng, subdivisions), jitter_sigma, rng)
            path = root / class_name / f"{class_name}_{i:02d}.off"
            save_mesh(mesh, path)
            entries.append(ManifestEntry(path=path, class_name=class_name))
    manifest_path = DatasetManifest(entries=entries).write_csv(root / "manifest.csv")
    logger.info(f"Wrote {len(entries)} synthetic meshes to {root}")
    return manifest_path
