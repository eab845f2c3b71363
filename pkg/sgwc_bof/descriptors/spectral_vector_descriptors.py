# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

from sgwc_bof.baselines import cshape_dna, gps_embedding, shape_dna
from sgwc_bof.descriptors._base import DescriptorKind, SpectralVectorDescriptor


class ShapeDnaDescriptor(SpectralVectorDescriptor):
    kind = DescriptorKind.SHAPE_DNA

    def local_signatures(self, mesh, basis):
        return shape_dna(basis).values[:, None]


class CShapeDnaDescriptor(SpectralVectorDescriptor):
    kind = DescriptorKind.CSHAPE_DNA

    def local_signatures(self, mesh, basis):
        return cshape_dna(basis, mesh.total_area()).values[:, None]


class GpsEmbeddingDescriptor(SpectralVectorDescriptor):
    kind = DescriptorKind.GPS_EMBEDDING

    def local_signatures(self, mesh, basis):
        return gps_embedding(basis, mesh.total_area()).values[:, None]
