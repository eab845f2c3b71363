# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""Report and synthetic-data verbs."""

from pathlib import Path
from typing import Annotated

import typer

from sgwc_bof.cli.commands.options import execute
from sgwc_bof.models import RunReport
from sgwc_bof.synthetic import make_synthetic_dataset
from sgwc_bof.utils import format_TSV


def report_command(
    report_path: Annotated[Path, typer.Argument(help="A report.json written by evaluate or sweep.")],
) -> None:
    """Print a TSV summary of a report.json."""

    def action():
        report = RunReport.read_json(report_path)
        typer.echo(f"# {report.descriptor_kind} ({len(report.class_names)} classes)")
        typer.echo(report.to_tsv())
        typer.echo("")
        typer.echo(
            format_TSV(
                ["actual \\ predicted", *report.class_names],
                [[name, *row] for name, row in zip(report.class_names, report.confusion, strict=True)],
            )
        )
        if report.stage_seconds:
            typer.echo("")
            typer.echo(
                format_TSV(["stage", "seconds"], [[k, f"{v:.3f}"] for k, v in report.stage_seconds.items()])
            )
        return []

    execute(action)


def synth_command(
    root: Annotated[Path, typer.Argument(help="Directory to write the meshes and manifest.csv into.")],
    instances_per_class: Annotated[int, typer.Option("--instances", help="Meshes per class.")] = 20,
    seed: Annotated[int, typer.Option("--seed", help="Generator seed.")] = 0,
    subdivisions: Annotated[int, typer.Option("--subdivisions", help="Icosphere subdivision level.")] = 3,
    jitter_sigma: Annotated[float, typer.Option("--jitter", help="Vertex noise standard deviation.")] = 0.005,
) -> None:
    """Write the sphere / torus / bumpy synthetic dataset."""

    def action():
        manifest = make_synthetic_dataset(root, instances_per_class, seed, subdivisions, jitter_sigma)
        typer.echo(f"Manifest written to {manifest}")
        return []

    execute(action)
