# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""Typer CLI command modules."""

from sgwc_bof.cli.commands.experiment import (
    describe_command,
    encode_command,
    evaluate_command,
    sweep_command,
    train_command,
    vocab_command,
)
from sgwc_bof.cli.commands.options import experiment_callback
from sgwc_bof.cli.commands.report import report_command, synth_command

__all__ = [
    "describe_command",
    "encode_command",
    "evaluate_command",
    "experiment_callback",
    "report_command",
    "sweep_command",
    "synth_command",
    "train_command",
    "vocab_command",
]
