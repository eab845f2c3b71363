# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""Spectral graph wavelet codes with geodesic-aware bag-of-features for 3D shape classification."""

from sgwc_bof.__version__ import __version__

__all__ = [
    "__version__",
]
