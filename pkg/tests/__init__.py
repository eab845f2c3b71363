# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License
