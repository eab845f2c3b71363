# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""Logging Configuration for sgwc_bof"""

import logging

logger = logging.getLogger("sgwc_bof")


def configure_logging(level: str = "INFO") -> None:
    """Configure root logging for command-line runs. Library code never calls this."""
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)-7s %(name)s: %(message)s",
    )
