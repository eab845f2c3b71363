# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""
Pytest configuration and shared fixtures for sgwc_bof tests.

This module provides:
- small procedural meshes (icosahedron, icospheres, a torus, a collinear strip)
- dense eigenbases of small meshes (q = m)
- a synthetic three-class dataset shared by the pipeline and CLI tests
- autouse resets of the hook registry and the config singleton
"""

import logging

import numpy as np
import pytest

from sgwc_bof.config import reset_config
from sgwc_bof.hooks import HookRegistry
from sgwc_bof.laplacian import assemble, solve_eigs
from sgwc_bof.mesh import Mesh
from sgwc_bof.synthetic import icosahedron, icosphere, jitter, make_synthetic_dataset, torus

logger = logging.getLogger(__name__)


@pytest.fixture(autouse=True)
def reset_registry():
    """Reset the hook singleton between tests."""
    HookRegistry.reset()
    yield
    HookRegistry.reset()


@pytest.fixture(autouse=True)
def reset_config_singleton():
    reset_config()
    yield
    reset_config()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def ico():
    return icosahedron()


@pytest.fixture
def sphere42():
    return icosphere(1)


@pytest.fixture
def sphere162():
    return icosphere(2)


@pytest.fixture
def small_torus():
    return torus(n_major=12, n_minor=6)


@pytest.fixture
def collinear_strip():
    """Three collinear vertices 1 apart joined by one degenerate triangle."""
    return Mesh(np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]), np.array([[0, 1, 2]]))


@pytest.fixture
def jittered_sphere(rng):
    """Icosphere with symmetry broken by vertex noise, so signatures are all distinct."""
    return jitter(icosphere(2), 0.01, rng)


def _full_basis(mesh):
    return solve_eigs(assemble(mesh), mesh.n_vertices)


@pytest.fixture
def dense_basis():
    """Dense generalized eigenbasis with q = m, as a function of the mesh."""
    return _full_basis


@pytest.fixture
def ico_basis(ico):
    return _full_basis(ico)


@pytest.fixture
def sphere42_basis(sphere42):
    return _full_basis(sphere42)


@pytest.fixture(scope="session")
def synthetic_manifest(tmp_path_factory):
    """Four meshes per class at one subdivision level; 512 vertices per torus."""
    root = tmp_path_factory.mktemp("synthetic")
    manifest = make_synthetic_dataset(root, instances_per_class=4, seed=7, subdivisions=1)
    logger.info(f"Synthetic dataset at {root}")
    return manifest
