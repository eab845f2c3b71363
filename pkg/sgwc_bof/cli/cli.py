# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""Typer CLI app composed from separated command modules."""

import typer

from sgwc_bof.cli.commands import (
    describe_command,
    encode_command,
    evaluate_command,
    experiment_callback,
    report_command,
    sweep_command,
    synth_command,
    train_command,
    vocab_command,
)

app = typer.Typer(
    add_completion=False,
    no_args_is_help=True,
)

app.callback()(experiment_callback)
app.command("describe")(describe_command)
app.command("vocab")(vocab_command)
app.command("encode")(encode_command)
app.command("train")(train_command)
app.command("evaluate")(evaluate_command)
app.command("sweep")(sweep_command)
app.command("report")(report_command)
app.command("synth")(synth_command)


def main() -> None:
    """Console-script entrypoint for the Typer CLI."""
    app()


__all__ = ["app", "main"]


if __name__ == "__main__":
    main()
