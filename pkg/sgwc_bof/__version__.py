# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""Spectral graph wavelet bag-of-features shape classification."""

__version__ = "0.3.0"
