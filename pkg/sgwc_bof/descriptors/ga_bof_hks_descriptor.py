# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""Geodesic-aware BoF over heat kernel signatures.

The HKS uses as many time scales as the wavelet signature has rows at the
same resolution, so both vocabulary kinds see descriptors of equal dimension.
"""

from sgwc_bof.baselines import default_hks_scales, hks
from sgwc_bof.descriptors._base import DescriptorKind, VocabularyDescriptor
from sgwc_bof.sgw import signature_dimension


class GaBofHksDescriptor(VocabularyDescriptor):
    kind = DescriptorKind.GA_BOF_HKS

    def local_signatures(self, mesh, basis):
        scales = default_hks_scales(basis, signature_dimension(self.resolution))
        return hks(basis, scales).values
