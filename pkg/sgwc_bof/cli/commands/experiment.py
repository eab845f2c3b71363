# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""Pipeline verbs: describe, vocab, encode, train, evaluate, sweep."""

from pathlib import Path

import typer

from sgwc_bof.cli.commands.options import CliState, execute
from sgwc_bof.pipeline import (
    RunState,
    run_describe,
    run_encode,
    run_experiment,
    run_sweep,
    run_train,
    run_vocab,
    save_dataset,
)
from sgwc_bof.store import write_codebook
from sgwc_bof.utils import atomic_write, format_TSV


def describe_command(ctx: typer.Context) -> None:
    """Compute and cache eigenbases and local signatures for every mesh."""
    state: CliState = ctx.obj

    def action():
        config = state.config()
        run_state = RunState()
        shapes = run_describe(config, state=run_state)
        rows = [[s.path, s.class_name, s.n_vertices, f"{s.lambda_max:.6g}", "x".join(map(str, s.signatures.shape))] for s in shapes]
        typer.echo(format_TSV(["path", "class", "vertices", "lambda_max", "signatures"], rows))
        return run_state.failures

    execute(action)


def vocab_command(ctx: typer.Context) -> None:
    """Train the vocabulary on all described shapes and write vocabulary.bin."""
    state: CliState = ctx.obj

    def action():
        config = state.config()
        run_state = RunState()
        shapes = run_describe(config, state=run_state)
        codebook = run_vocab(config, shapes, state=run_state)
        if codebook is None:
            typer.echo(f"{config.descriptor_kind.value} does not use a vocabulary")
            return run_state.failures
        path = Path(config.output_dir) / "vocabulary.bin"
        with atomic_write(path, "wb") as handle:
            write_codebook(handle, codebook)
        typer.echo(f"{codebook.dimension}x{codebook.k} vocabulary (alpha={codebook.alpha:.6g}) written to {path}")
        return run_state.failures

    execute(action)


def encode_command(ctx: typer.Context) -> None:
    """Encode every shape into its global feature vector and write dataset.npz."""
    state: CliState = ctx.obj

    def action():
        config = state.config()
        run_state = RunState()
        shapes = run_describe(config, state=run_state)
        codebook = run_vocab(config, shapes, state=run_state)
        encoded = run_encode(config, shapes, codebook, state=run_state)
        path = save_dataset(encoded, shapes, Path(config.output_dir) / "dataset.npz")
        X = encoded.dataset.X
        typer.echo(f"{X.shape[0]}x{X.shape[1]} feature matrix written to {path}")
        return run_state.failures

    execute(action)


def train_command(ctx: typer.Context) -> None:
    """Train the one-vs-all SVM on every shape and write model.bin."""
    state: CliState = ctx.obj

    def action():
        path, failures = run_train(state.config())
        typer.echo(f"Model written to {path}")
        return failures

    execute(action)


def evaluate_command(ctx: typer.Context) -> None:
    """Run the full experiment over repeated stratified splits and write the report."""
    state: CliState = ctx.obj

    def action():
        report = run_experiment(state.config())
        typer.echo(report.to_tsv())
        return report.failures

    execute(action)


def sweep_command(ctx: typer.Context) -> None:
    """Evaluate every (epsilon, vocabulary size) pair of the sweep grid."""
    state: CliState = ctx.obj

    def action():
        rows, failures = run_sweep(state.config())
        typer.echo(
            format_TSV(
                ["epsilon", "k", "mean_accuracy", "min_accuracy", "max_accuracy"],
                [
                    [r["epsilon"], r["k"], f"{r['mean_accuracy']:.4f}", f"{r['min_accuracy']:.4f}", f"{r['max_accuracy']:.4f}"]
                    for r in rows
                ],
            )
        )
        return failures

    execute(action)
