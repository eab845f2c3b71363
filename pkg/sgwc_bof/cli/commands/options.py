# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""Global experiment options shared by every verb, and config resolution."""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Annotated, Any

import typer
from pydantic import ValidationError

from sgwc_bof.bof import AlphaMode
from sgwc_bof.config import CACHE_DIR_ENV, OTEL_FILE_ENV, ExperimentConfig, VocabularyScope, resolve_config
from sgwc_bof.descriptors import DescriptorKind
from sgwc_bof.log import configure_logging
from sgwc_bof.models import MeshFailure
from sgwc_bof.otel_hook import maybe_register_otel
from sgwc_bof.utils import parse_bool_option

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARTIAL = 2


@dataclass
class CliState:
    config_file: Path | None = None
    overrides: dict[str, Any] = field(default_factory=dict)

    def config(self) -> ExperimentConfig:
        """Defaults < --config file < environment and flags."""
        try:
            config = resolve_config(self.config_file, **self.overrides)
        except (OSError, ValueError, ValidationError) as e:
            logger.error(f"Invalid configuration: {e}")
            raise typer.Exit(EXIT_FAILURE) from e
        maybe_register_otel(config.otel_file)
        return config


def _parse_floats(value: str | None, option_name: str) -> list[float] | None:
    if value is None:
        return None
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise typer.BadParameter(f"{option_name} expects comma-separated numbers, got {value!r}") from None


def _parse_ints(value: str | None, option_name: str) -> list[int] | None:
    if value is None:
        return None
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise typer.BadParameter(f"{option_name} expects comma-separated integers, got {value!r}") from None


def experiment_callback(
    ctx: typer.Context,
    config_file: Annotated[
        Path | None,
        typer.Option("--config", help="JSON document with ExperimentConfig field names."),
    ] = None,
    log_level: Annotated[
        str,
        typer.Option("--log-level", envvar="SGWC_BOF_LOG_LEVEL", help="Logging level."),
    ] = "INFO",
    otel_file: Annotated[
        Path | None,
        typer.Option("--otel-file", envvar=OTEL_FILE_ENV, help="Path to JSONL file for OpenTelemetry span export."),
    ] = None,
    manifest: Annotated[
        Path | None,
        typer.Option("--manifest", help="CSV manifest (path,class) or a directory of class folders."),
    ] = None,
    cache_dir: Annotated[
        Path | None,
        typer.Option("--cache-dir", envvar=CACHE_DIR_ENV, help="Descriptor cache root."),
    ] = None,
    output_dir: Annotated[
        Path | None,
        typer.Option("--output-dir", help="Directory for reports, CSVs and models."),
    ] = None,
    descriptor_kind: Annotated[
        DescriptorKind | None,
        typer.Option("--kind", help="Descriptor kind."),
    ] = None,
    eigen_count: Annotated[
        int | None, typer.Option("--eigen-count", help="Eigenpairs q per mesh (default 201).")
    ] = None,
    resolution: Annotated[
        int | None, typer.Option("--resolution", help="Wavelet resolution R (default 2).")
    ] = None,
    vocabulary_size: Annotated[
        int | None, typer.Option("--vocab-size", help="Codewords k (default 128).")
    ] = None,
    epsilon: Annotated[
        float | None, typer.Option("--epsilon", help="Geodesic kernel width (default 0.1).")
    ] = None,
    test_fraction: Annotated[
        float | None, typer.Option("--test-fraction", help="Held-out fraction per class (default 0.5).")
    ] = None,
    repetitions: Annotated[
        int | None, typer.Option("--repetitions", help="Random splits evaluated (default 10).")
    ] = None,
    seed: Annotated[int | None, typer.Option("--seed", help="Base seed.")] = None,
    c_grid: Annotated[
        str | None,
        typer.Option("--c-grid", help="Comma-separated SVM C values (default 10000); several trigger cross-validation."),
    ] = None,
    workers: Annotated[
        int | None,
        typer.Option("--workers", envvar="SGWC_BOF_WORKERS", help="Worker processes for per-mesh stages."),
    ] = None,
    vocab_per_run: Annotated[
        str | None,
        typer.Option("--vocab-per-run", help="Rebuild the vocabulary for every repetition (true/false)."),
    ] = None,
    vocab_scope: Annotated[
        VocabularyScope | None,
        typer.Option("--vocab-scope", help="Train the vocabulary on all shapes or training shapes only."),
    ] = None,
    alpha_mode: Annotated[
        AlphaMode | None,
        typer.Option("--alpha-mode", help="How the median cluster size is measured."),
    ] = None,
    cv_folds: Annotated[int | None, typer.Option("--cv-folds", help="Folds for C selection (default 5).")] = None,
    svm_tol: Annotated[
        float | None, typer.Option("--svm-tol", help="Dual violation stopping threshold (default 1e-6).")
    ] = None,
    svm_max_epochs: Annotated[
        int | None, typer.Option("--svm-max-epochs", help="Dual coordinate descent epochs (default 1000).")
    ] = None,
    kmeans_restarts: Annotated[
        int | None, typer.Option("--kmeans-restarts", help="k-means++ restarts (default 5).")
    ] = None,
    kmeans_max_iter: Annotated[
        int | None, typer.Option("--kmeans-max-iter", help="Lloyd iterations per restart (default 100).")
    ] = None,
    kmeans_tol: Annotated[
        float | None, typer.Option("--kmeans-tol", help="Center movement threshold (default 1e-9).")
    ] = None,
    eigen_tolerance: Annotated[
        float | None, typer.Option("--eigen-tol", help="ARPACK tolerance; 0 means machine precision.")
    ] = None,
    eigen_max_iter: Annotated[
        int | None, typer.Option("--eigen-max-iter", help="ARPACK iteration cap.")
    ] = None,
    dense_kernel_limit: Annotated[
        int | None,
        typer.Option("--dense-kernel-limit", help="Vertex count above which F is accumulated in blocks."),
    ] = None,
    sweep_epsilons: Annotated[
        str | None, typer.Option("--sweep-epsilons", help="Comma-separated kernel widths for the sweep verb.")
    ] = None,
    sweep_vocab_sizes: Annotated[
        str | None,
        typer.Option("--sweep-vocab-sizes", help="Comma-separated vocabulary sizes for the sweep verb."),
    ] = None,
) -> None:
    """Spectral graph wavelet bag-of-features shape classification."""
    configure_logging(log_level)
    overrides = {
        "otel_file": otel_file,
        "manifest": manifest,
        "cache_dir": cache_dir,
        "output_dir": output_dir,
        "descriptor_kind": descriptor_kind,
        "eigen_count": eigen_count,
        "resolution": resolution,
        "vocabulary_size": vocabulary_size,
        "epsilon": epsilon,
        "test_fraction": test_fraction,
        "repetitions": repetitions,
        "seed": seed,
        "c_grid": _parse_floats(c_grid, "--c-grid"),
        "workers": workers,
        "vocab_per_run": None if vocab_per_run is None else parse_bool_option(vocab_per_run, "--vocab-per-run"),
        "vocab_scope": vocab_scope,
        "alpha_mode": alpha_mode,
        "cv_folds": cv_folds,
        "svm_tol": svm_tol,
        "svm_max_epochs": svm_max_epochs,
        "kmeans_restarts": kmeans_restarts,
        "kmeans_max_iter": kmeans_max_iter,
        "kmeans_tol": kmeans_tol,
        "eigen_tolerance": eigen_tolerance,
        "eigen_max_iter": eigen_max_iter,
        "dense_kernel_limit": dense_kernel_limit,
        "sweep_epsilons": _parse_floats(sweep_epsilons, "--sweep-epsilons"),
        "sweep_vocab_sizes": _parse_ints(sweep_vocab_sizes, "--sweep-vocab-sizes"),
    }
    ctx.obj = CliState(
        config_file=config_file,
        overrides={key: value for key, value in overrides.items() if value is not None},
    )


def execute(action: Callable[[], list[MeshFailure]]) -> None:
    """Run *action* and translate its outcome to an exit code.

    0 on success, 1 when the action raises, 2 when some meshes failed.
    """
    try:
        failures = action()
    except typer.Exit:
        raise
    except Exception as e:
        logger.error(f"{type(e).__name__}: {e}")
        raise typer.Exit(EXIT_FAILURE) from e
    if failures:
        typer.echo(f"{len(failures)} mesh(es) failed:", err=True)
        for failure in failures:
            typer.echo(f"  [{failure.stage}] {failure.path}: {failure.error}", err=True)
        raise typer.Exit(EXIT_PARTIAL)
