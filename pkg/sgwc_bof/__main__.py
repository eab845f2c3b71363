# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""
Entry point for running sgwc_bof as a module.

This allows the package to be run with: python -m sgwc_bof
"""

from sgwc_bof.cli.cli import main

if __name__ == "__main__":
    main()
