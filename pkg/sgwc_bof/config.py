# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

import json
import os
from enum import Enum
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, field_validator

from sgwc_bof.bof import AlphaMode
from sgwc_bof.classify import DEFAULT_C
from sgwc_bof.descriptors import DescriptorKind

CACHE_DIR_ENV = "SGWC_BOF_CACHE_DIR"
OTEL_FILE_ENV = "SGWC_BOF_OTEL_FILE"


class VocabularyScope(str, Enum):
    ALL = "all"
    TRAIN = "train"


def default_cache_dir() -> Path:
    return Path(os.environ.get(CACHE_DIR_ENV) or Path.home() / ".cache" / "sgwc_bof")


class ExperimentConfig(BaseModel):
    """Singleton configuration object for an sgwc_bof experiment."""

    # Dataset and outputs
    manifest: Path | None = Field(
        default=None, description="CSV manifest (path,class) or a directory of class folders"
    )
    cache_dir: Path = Field(
        default_factory=default_cache_dir,
        description=f"Descriptor cache root (env {CACHE_DIR_ENV}, default ~/.cache/sgwc_bof)",
    )
    output_dir: Path = Field(default=Path("results"), description="Where reports and CSVs are written")

    # Descriptor parameters
    descriptor_kind: DescriptorKind = Field(
        default=DescriptorKind.SGWC_BOF, description="Feature construction method"
    )
    eigen_count: int = Field(
        default=201, gt=0, description="Eigenpairs q per mesh, capped at m - 1 on small meshes"
    )
    resolution: int = Field(default=2, gt=0, description="Wavelet resolution R")
    vocabulary_size: int = Field(default=128, gt=0, description="Codewords k")
    epsilon: float = Field(default=0.1, gt=0, description="Geodesic kernel width")

    # Evaluation protocol
    test_fraction: float = Field(default=0.5, gt=0, lt=1, description="Per-class held-out fraction")
    repetitions: int = Field(default=10, gt=0, description="Random splits evaluated")
    seed: int = Field(default=0, description="Base seed; repetition r uses seed + r")
    c_grid: list[float] = Field(
        default_factory=lambda: [DEFAULT_C],
        description="SVM C values; more than one triggers cross-validated selection",
    )

    # Solvers
    workers: int = Field(default=1, gt=0, description="Worker processes for per-mesh stages")
    eigen_tolerance: float = Field(
        default=0.0, ge=0, description="ARPACK tolerance (0 means machine precision)"
    )
    eigen_max_iter: int | None = Field(default=None, description="ARPACK iteration cap")
    kmeans_restarts: int = Field(default=5, gt=0, description="k-means++ restarts")
    kmeans_max_iter: int = Field(default=100, gt=0, description="Lloyd iterations per restart")
    kmeans_tol: float = Field(default=1e-9, gt=0, description="Center movement threshold")
    alpha_mode: AlphaMode = Field(
        default=AlphaMode.DISTANCE, description="How the median cluster size is measured"
    )
    vocab_scope: VocabularyScope = Field(
        default=VocabularyScope.ALL,
        description="Train the vocabulary on all shapes or on each run's training shapes",
    )
    vocab_per_run: bool = Field(default=False, description="Rebuild the vocabulary for every repetition")
    svm_tol: float = Field(default=1e-6, gt=0, description="Dual violation stopping threshold")
    svm_max_epochs: int = Field(default=1000, gt=0, description="Dual coordinate descent epochs")
    cv_folds: int = Field(default=5, ge=2, description="Folds for C selection")
    dense_kernel_limit: int = Field(
        default=4000, gt=0, description="Vertex count above which F is accumulated in blocks"
    )

    # Sweep
    sweep_epsilons: list[float] = Field(
        default_factory=lambda: [0.01, 0.05, 0.1, 0.5, 1.0], description="Kernel widths swept"
    )
    sweep_vocab_sizes: list[int] = Field(
        default_factory=lambda: [16, 32, 64, 128, 256, 512], description="Vocabulary sizes swept"
    )

    otel_file: Path | None = Field(
        default=None, description=f"JSON-lines span file (env {OTEL_FILE_ENV})"
    )

    model_config = ConfigDict(validate_assignment=True)

    @field_validator("c_grid", "sweep_epsilons")
    @classmethod
    def _positive_reals(cls, values: list[float]) -> list[float]:
        if not values or any(v <= 0 for v in values):
            raise ValueError(f"expected a non-empty list of positive values, got {values}")
        return values

    @field_validator("sweep_vocab_sizes")
    @classmethod
    def _positive_counts(cls, values: list[int]) -> list[int]:
        if not values or any(v < 1 for v in values):
            raise ValueError(f"expected a non-empty list of positive counts, got {values}")
        return values

    def needs_c_selection(self) -> bool:
        return len(self.c_grid) > 1

    def per_run_vocabulary(self) -> bool:
        """Training-only vocabularies are necessarily rebuilt for every split."""
        return self.vocab_per_run or self.vocab_scope is VocabularyScope.TRAIN


def load_config_file(path: str | Path) -> dict:
    """Read a JSON config document; unknown keys are rejected."""
    with open(path) as f:
        document = json.load(f)
    if not isinstance(document, dict):
        raise ValueError(f"{path}: expected a JSON object, got {type(document).__name__}")
    unknown = set(document) - set(ExperimentConfig.model_fields)
    if unknown:
        raise ValueError(f"{path}: unknown config field(s) {sorted(unknown)}")
    return document


# Singleton instance
_config_instance: ExperimentConfig | None = None

_OPTIONAL_FIELDS = ("manifest", "eigen_max_iter", "otel_file")


def get_config() -> ExperimentConfig:
    """Get the singleton configuration instance."""
    global _config_instance
    if _config_instance is None:
        _config_instance = ExperimentConfig()
    return _config_instance


def set_config(**kwargs) -> ExperimentConfig:
    """Set configuration values and return the config instance.

    String "none"/"null"/"" values reset optional fields to None and are
    otherwise dropped so the defaults apply.
    """

    def should_skip(value):
        return isinstance(value, str) and value.lower() in ("none", "null", "")

    normalized_kwargs = {}
    for key, value in kwargs.items():
        if should_skip(value):
            if key in _OPTIONAL_FIELDS:
                normalized_kwargs[key] = None
        elif value is not None:
            normalized_kwargs[key] = value

    global _config_instance
    if _config_instance is None:
        _config_instance = ExperimentConfig(**normalized_kwargs)
    else:
        for key, value in normalized_kwargs.items():
            if hasattr(_config_instance, key):
                setattr(_config_instance, key, value)
    return _config_instance


def reset_config() -> ExperimentConfig:
    """Reset configuration to defaults."""
    global _config_instance
    _config_instance = ExperimentConfig()
    return _config_instance


def resolve_config(config_file: str | Path | None = None, **overrides) -> ExperimentConfig:
    """Defaults, then the config file, then *overrides* (environment and flags, already merged)."""
    reset_config()
    if config_file is not None:
        set_config(**load_config_file(config_file))
    return set_config(**overrides)
