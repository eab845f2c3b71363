# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""Spectral graph wavelet signatures pooled with the geodesic kernel."""

from sgwc_bof.descriptors._base import DescriptorKind, VocabularyDescriptor
from sgwc_bof.sgw import sgws_matrix


class SgwcBofDescriptor(VocabularyDescriptor):
    kind = DescriptorKind.SGWC_BOF

    def local_signatures(self, mesh, basis):
        return sgws_matrix(basis, self.resolution).values
