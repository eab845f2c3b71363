# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""Command-line interface for sgwc_bof."""

from sgwc_bof.cli.cli import app, main

__all__ = ["app", "main"]
