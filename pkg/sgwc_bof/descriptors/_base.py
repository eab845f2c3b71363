# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""Base classes and enums for descriptor kinds."""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Callable
from enum import Enum
from typing import ClassVar

import numpy as np

from sgwc_bof.bof import Codebook, soft_assign
from sgwc_bof.global_descriptor import (
    DEFAULT_EPSILON,
    GeodesicMatrix,
    geodesic_kernel,
    sgwc_bof,
    sgwc_bof_streaming,
)
from sgwc_bof.laplacian import EigenBasis
from sgwc_bof.mesh import Mesh

GeodesicProvider = Callable[[], GeodesicMatrix]


class DescriptorKind(str, Enum):
    SGWC_BOF = "sgwc-bof"
    GA_BOF_HKS = "ga-bof-hks"
    SHAPE_DNA = "shape-dna"
    CSHAPE_DNA = "cshape-dna"
    GPS_EMBEDDING = "gps-embedding"


class BaseDescriptor(ABC):
    """Abstract base class for every descriptor kind.

    A kind turns a mesh and its eigenbasis into a per-shape matrix at the
    describe stage, then into one feature vector at the encode stage. Kinds
    with ``needs_vocabulary`` produce p x m local signatures that are pooled
    through a codebook; the others produce a d x 1 global vector.
    """

    kind: ClassVar[DescriptorKind]
    needs_vocabulary: ClassVar[bool]

    def __init__(self, resolution: int = 2):
        self.resolution = resolution

    @property
    def name(self) -> str:
        return self.kind.value

    def parameters(self) -> dict:
        """Everything the describe-stage output depends on, for cache keys."""
        return {"kind": self.kind.value, "resolution": self.resolution}

    @abstractmethod
    def local_signatures(self, mesh: Mesh, basis: EigenBasis) -> np.ndarray:
        """Per-shape matrix computed at the describe stage."""

    @abstractmethod
    def encode(
        self,
        signatures: np.ndarray,
        mesh: Mesh,
        codebook: Codebook | None = None,
        geodesics: GeodesicProvider | None = None,
    ) -> np.ndarray:
        """Feature vector fed to the classifier."""


class VocabularyDescriptor(BaseDescriptor):
    """Local signatures soft-assigned to a codebook and pooled through the geodesic kernel."""

    needs_vocabulary = True

    def __init__(
        self,
        resolution: int = 2,
        epsilon: float = DEFAULT_EPSILON,
        dense_kernel_limit: int = 4000,
    ):
        super().__init__(resolution)
        self.epsilon = epsilon
        self.dense_kernel_limit = dense_kernel_limit

    def encode(self, signatures, mesh, codebook=None, geodesics=None):
        if codebook is None:
            raise ValueError(f"{self.name} encoding needs a codebook")
        codes = soft_assign(signatures, codebook)
        if mesh.n_vertices > self.dense_kernel_limit:
            return sgwc_bof_streaming(mesh, codes, self.epsilon).x
        if geodesics is None:
            raise ValueError(f"{self.name} encoding needs geodesic distances")
        kernel = geodesic_kernel(geodesics(), self.epsilon)
        return sgwc_bof(codes, kernel, self.epsilon).x


class SpectralVectorDescriptor(BaseDescriptor):
    """Global spectral vectors; the vector is the feature."""

    needs_vocabulary = False

    def encode(self, signatures, mesh, codebook=None, geodesics=None):
        return np.asarray(signatures, dtype=np.float64)[:, 0].copy()
