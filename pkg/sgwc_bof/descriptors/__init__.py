# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""Descriptor kinds.

Each kind is a class with ``local_signatures`` (describe stage) and
``encode`` (encode stage); the rest of the pipeline is shared.
"""

from sgwc_bof.descriptors._base import (
    BaseDescriptor,
    DescriptorKind,
    SpectralVectorDescriptor,
    VocabularyDescriptor,
)
from sgwc_bof.descriptors.ga_bof_hks_descriptor import GaBofHksDescriptor
from sgwc_bof.descriptors.sgwc_bof_descriptor import SgwcBofDescriptor
from sgwc_bof.descriptors.spectral_vector_descriptors import (
    CShapeDnaDescriptor,
    GpsEmbeddingDescriptor,
    ShapeDnaDescriptor,
)

DESCRIPTORS: dict[DescriptorKind, type[BaseDescriptor]] = {
    DescriptorKind.SGWC_BOF: SgwcBofDescriptor,
    DescriptorKind.GA_BOF_HKS: GaBofHksDescriptor,
    DescriptorKind.SHAPE_DNA: ShapeDnaDescriptor,
    DescriptorKind.CSHAPE_DNA: CShapeDnaDescriptor,
    DescriptorKind.GPS_EMBEDDING: GpsEmbeddingDescriptor,
}


def create_descriptor(
    kind: DescriptorKind | str,
    resolution: int = 2,
    epsilon: float = 0.1,
    dense_kernel_limit: int = 4000,
) -> BaseDescriptor:
    cls = DESCRIPTORS[DescriptorKind(kind)]
    if issubclass(cls, VocabularyDescriptor):
        return cls(resolution=resolution, epsilon=epsilon, dense_kernel_limit=dense_kernel_limit)
    return cls(resolution=resolution)


__all__ = [
    "BaseDescriptor",
    "CShapeDnaDescriptor",
    "DESCRIPTORS",
    "DescriptorKind",
    "GaBofHksDescriptor",
    "GpsEmbeddingDescriptor",
    "ShapeDnaDescriptor",
    "SgwcBofDescriptor",
    "SpectralVectorDescriptor",
    "VocabularyDescriptor",
    "create_descriptor",
]
