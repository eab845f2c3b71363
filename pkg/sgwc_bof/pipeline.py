# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""
End-to-end experiment orchestration.

describe -> vocab -> encode -> evaluate. Per-mesh stages run in a process
pool when ``workers > 1`` and go through the :class:`DescriptorStore`, so a
warm cache skips every eigensolve and geodesic computation. A mesh that fails
is logged, reported through ``HookEvent.MESH_FAILED`` and left out; the run
carries on with the rest.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import TypeVar

import numpy as np

from sgwc_bof.bof import Codebook, kmeans
from sgwc_bof.classify import (
    ConfusionMatrix,
    LabeledDataset,
    accuracy,
    confusion_matrix,
    predict_many,
    save_model,
    select_c,
    stratified_indices,
    train_ova_svm,
)
from sgwc_bof.config import ExperimentConfig, VocabularyScope
from sgwc_bof.descriptors import BaseDescriptor, DescriptorKind, create_descriptor
from sgwc_bof.global_descriptor import geodesic_matrix
from sgwc_bof.hooks import HookEvent, HookRegistry, StageTimer, with_hooks
from sgwc_bof.laplacian import assemble, solve_eigs
from sgwc_bof.mesh import load_mesh
from sgwc_bof.models import DatasetManifest, MeshFailure, RepetitionResult, RunReport
from sgwc_bof.sgw import build_kernel_bank, frame_diagnostic
from sgwc_bof.store import DescriptorStore, EntryKind, StoreStats, write_codebook
from sgwc_bof.utils import atomic_write, hash_params, write_csv

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

#: ARPACK start vector seed; fixed so eigenbases are shared across experiment seeds.
EIGEN_SEED = 0


@dataclass(frozen=True)
class ShapeRecord:
    """One successfully described shape."""

    path: Path
    class_name: str
    label: int
    content_hash: str
    n_vertices: int
    lambda_max: float
    signatures: np.ndarray


@dataclass(frozen=True)
class EncodedDataset:
    """Features for the shapes that encoded cleanly; ``shape_indices`` maps columns to shapes."""

    dataset: LabeledDataset
    shape_indices: np.ndarray


@dataclass
class RunState:
    """Counters and failures accumulated across the stages of one run."""

    stats: StoreStats = field(default_factory=StoreStats)
    failures: list[MeshFailure] = field(default_factory=list)
    class_names: tuple[str, ...] = ()

    def fail(self, path: Path | str, stage: str, error: str) -> None:
        """Record a per-mesh failure once per (path, stage), however many repetitions hit it."""
        if any(f.path == str(path) and f.stage == stage for f in self.failures):
            return
        logger.error(f"{stage} failed for {path}: {error}")
        self.failures.append(MeshFailure(path=str(path), stage=stage, error=error))
        HookRegistry.get_instance().fire(HookEvent.MESH_FAILED, path=str(path), stage=stage, error=error)

    def counters(self) -> dict[str, int]:
        counters = self.stats.as_dict()
        counters["eigensolves"] = self.stats.computed.get(EntryKind.EIGENBASIS.value, 0)
        counters["geodesic_solves"] = self.stats.computed.get(EntryKind.GEODESICS.value, 0)
        return counters


def _parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: int) -> list[R]:
    """Ordered map, in a process pool when *workers* > 1."""
    items = list(items)
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def make_descriptor(config: ExperimentConfig, epsilon: float | None = None) -> BaseDescriptor:
    return create_descriptor(
        config.descriptor_kind,
        resolution=config.resolution,
        epsilon=config.epsilon if epsilon is None else epsilon,
        dense_kernel_limit=config.dense_kernel_limit,
    )


def eigen_parameters(config: ExperimentConfig, n_vertices: int | None = None) -> dict:
    """Eigensolver settings that key every cache entry derived from an eigenbasis."""
    q = config.eigen_count if n_vertices is None else min(config.eigen_count, n_vertices - 1)
    return {"q": q, "tol": config.eigen_tolerance, "max_iter": config.eigen_max_iter}


def load_manifest(config: ExperimentConfig) -> DatasetManifest:
    if config.manifest is None:
        raise ValueError("No dataset manifest configured (--manifest or 'manifest' in the config file)")
    return DatasetManifest.load(config.manifest)


# ── describe ─────────────────────────────────────────────────────────


def _describe_shape(config: ExperimentConfig, item: tuple[Path, str, int]):
    path, class_name, label = item
    store = DescriptorStore(config.cache_dir)
    try:
        mesh = load_mesh(path)
        content_hash = mesh.content_hash()
        eigen_params = eigen_parameters(config, mesh.n_vertices)
        q = eigen_params["q"]
        basis = store.get_or_compute(
            EntryKind.EIGENBASIS,
            content_hash,
            eigen_params,
            lambda: solve_eigs(
                assemble(mesh),
                q,
                seed=EIGEN_SEED,
                tol=config.eigen_tolerance,
                max_iter=config.eigen_max_iter,
            ),
        )
        descriptor = make_descriptor(config)
        signatures = store.get_or_compute(
            EntryKind.SIGNATURES,
            content_hash,
            {**descriptor.parameters(), **eigen_params},
            lambda: descriptor.local_signatures(mesh, basis),
        )
        record = ShapeRecord(
            path=path,
            class_name=class_name,
            label=label,
            content_hash=content_hash,
            n_vertices=mesh.n_vertices,
            lambda_max=basis.lambda_max,
            signatures=signatures,
        )
        return record, store.stats, None
    except Exception as e:
        return None, store.stats, f"{type(e).__name__}: {e}"


def write_frame_bounds(config: ExperimentConfig, lambda_max: float, path: Path) -> Path:
    """Sampled frame function of every resolution level for a representative lambda_max."""
    bank = build_kernel_bank(lambda_max, config.resolution)
    headers = ["level", "lambda", "G", "h2"] + [f"g2_{k}" for k in range(1, config.resolution + 1)]
    rows = []
    for level in range(1, config.resolution + 1):
        grid, G, h2, g2 = frame_diagnostic(bank, level, lambda_max)
        lower, upper = float(G.min()), float(G.max())
        logger.info(f"Frame bounds at level {level}: A={lower:.6g}, B={upper:.6g}")
        if lower <= 0.0:
            logger.warning(f"Lower frame bound at level {level} is not positive ({lower:.3g})")
        padding = [""] * (config.resolution - level)
        for i in range(grid.size):
            rows.append([level, grid[i], G[i], h2[i], *g2[i].tolist(), *padding])
    return write_csv(path, headers, rows)


@with_hooks("describe")
def run_describe(
    config: ExperimentConfig,
    manifest: DatasetManifest | None = None,
    state: RunState | None = None,
) -> list[ShapeRecord]:
    """Load, eigensolve and describe every mesh of the manifest, through the cache."""
    manifest = manifest if manifest is not None else load_manifest(config)
    state = state if state is not None else RunState()
    state.class_names = tuple(manifest.class_names)
    labels = manifest.labels
    items = [(e.path, e.class_name, int(labels[i])) for i, e in enumerate(manifest.entries)]

    shapes = []
    for (path, _, _), (record, stats, error) in zip(
        items, _parallel_map(partial(_describe_shape, config), items, config.workers), strict=True
    ):
        state.stats.merge(stats)
        if error is not None:
            state.fail(path, "describe", error)
        else:
            shapes.append(record)
    logger.info(f"Described {len(shapes)}/{len(items)} shapes")

    if shapes and config.descriptor_kind is DescriptorKind.SGWC_BOF:
        lambda_max = float(np.median([s.lambda_max for s in shapes]))
        write_frame_bounds(config, lambda_max, Path(config.output_dir) / "frame_bounds.csv")
    return shapes


# ── vocab ────────────────────────────────────────────────────────────


@with_hooks("vocab")
def run_vocab(
    config: ExperimentConfig,
    shapes: list[ShapeRecord],
    train_indices: np.ndarray | None = None,
    seed: int | None = None,
    vocabulary_size: int | None = None,
    state: RunState | None = None,
) -> Codebook | None:
    """K-means vocabulary over the concatenated signatures of the selected shapes.

    Returns None for descriptor kinds that do not use a vocabulary.
    """
    if not make_descriptor(config).needs_vocabulary:
        return None
    state = state if state is not None else RunState()
    seed = config.seed if seed is None else seed
    k = vocabulary_size or config.vocabulary_size
    selected = shapes if train_indices is None else [shapes[i] for i in train_indices]
    data = np.hstack([s.signatures for s in selected])
    if data.shape[1] < k:
        raise ValueError(f"Cannot build {k} codewords from {data.shape[1]} descriptors")

    training_hash = hash_params(shapes=[s.content_hash for s in selected])
    params = {
        "k": k,
        "seed": seed,
        "restarts": config.kmeans_restarts,
        "max_iter": config.kmeans_max_iter,
        "tol": config.kmeans_tol,
        "alpha_mode": config.alpha_mode.value,
        "signatures": make_descriptor(config).parameters(),
        "eigen": eigen_parameters(config),
    }
    store = DescriptorStore(config.cache_dir)
    codebook = store.get_or_compute(
        EntryKind.CODEBOOK,
        training_hash,
        params,
        lambda: kmeans(
            data,
            k,
            seed,
            restarts=config.kmeans_restarts,
            max_iter=config.kmeans_max_iter,
            tol=config.kmeans_tol,
            alpha_mode=config.alpha_mode,
            training_hash=training_hash,
        ),
    )
    state.stats.merge(store.stats)
    return codebook


# ── encode ───────────────────────────────────────────────────────────


def _encode_shape(
    config: ExperimentConfig, codebook: Codebook | None, epsilon: float, record: ShapeRecord
):
    store = DescriptorStore(config.cache_dir)
    try:
        descriptor = make_descriptor(config, epsilon)
        if descriptor.needs_vocabulary:
            mesh = load_mesh(record.path)

            def geodesics():
                return store.get_or_compute(
                    EntryKind.GEODESICS, record.content_hash, None, lambda: geodesic_matrix(mesh)
                )

            vector = descriptor.encode(record.signatures, mesh, codebook, geodesics)
        else:
            vector = descriptor.encode(record.signatures, None)
        return vector, store.stats, None
    except Exception as e:
        return None, store.stats, f"{type(e).__name__}: {e}"


@with_hooks("encode")
def run_encode(
    config: ExperimentConfig,
    shapes: list[ShapeRecord],
    codebook: Codebook | None,
    epsilon: float | None = None,
    state: RunState | None = None,
) -> EncodedDataset:
    """One feature column per shape; k^2 rows for the vocabulary kinds."""
    state = state if state is not None else RunState()
    epsilon = config.epsilon if epsilon is None else epsilon
    if make_descriptor(config).needs_vocabulary and codebook is None:
        raise ValueError(f"{config.descriptor_kind.value} encoding needs a codebook")
    results = _parallel_map(partial(_encode_shape, config, codebook, epsilon), shapes, config.workers)

    columns, labels, kept = [], [], []
    for i, (record, (vector, stats, error)) in enumerate(zip(shapes, results, strict=True)):
        state.stats.merge(stats)
        if error is not None:
            state.fail(record.path, "encode", error)
            continue
        columns.append(vector)
        labels.append(record.label)
        kept.append(i)
    if not columns:
        raise ValueError("No shape could be encoded")
    class_names = state.class_names or tuple(sorted({s.class_name for s in shapes}))
    dataset = LabeledDataset(np.column_stack(columns), np.array(labels), class_names)
    logger.info(f"Encoded {dataset.n_samples} shapes into {dataset.n_features}-dimensional features")
    return EncodedDataset(dataset=dataset, shape_indices=np.array(kept, dtype=np.intp))


def save_dataset(encoded: EncodedDataset, shapes: list[ShapeRecord], path: str | Path) -> Path:
    """Write features, labels, class names and source paths as an ``.npz`` archive."""
    with atomic_write(path, "wb") as handle:
        np.savez(
            handle,
            X=encoded.dataset.X,
            y=encoded.dataset.y,
            class_names=np.array(encoded.dataset.class_names),
            paths=np.array([str(shapes[i].path) for i in encoded.shape_indices]),
        )
    return Path(path)


# ── evaluate ─────────────────────────────────────────────────────────


def _choose_c(config: ExperimentConfig, train: LabeledDataset, seed: int) -> float:
    if not config.needs_c_selection():
        return config.c_grid[0]
    return select_c(
        train,
        config.c_grid,
        config.cv_folds,
        seed,
        tol=config.svm_tol,
        max_epochs=config.svm_max_epochs,
    )


def _evaluate_split(
    config: ExperimentConfig,
    dataset: LabeledDataset,
    train_idx: np.ndarray,
    test_idx: np.ndarray,
    seed: int,
) -> tuple[RepetitionResult, ConfusionMatrix]:
    train, test = dataset.subset(train_idx), dataset.subset(test_idx)
    C = _choose_c(config, train, seed)
    model = train_ova_svm(
        train, C, seed, tol=config.svm_tol, max_epochs=config.svm_max_epochs, workers=config.workers
    )
    cm = confusion_matrix(test.y, predict_many(model, test.X), dataset.n_classes)
    result = RepetitionResult(seed=seed, C=C, accuracy=accuracy(cm), confusion=cm.counts.tolist())
    logger.info(f"Repetition seed={seed}: accuracy {result.accuracy:.4f} (C={C})")
    return result, cm


def _repetition_seeds(config: ExperimentConfig) -> list[int]:
    return [config.seed + r for r in range(1, config.repetitions + 1)]


def _build_report(
    config: ExperimentConfig,
    class_names: tuple[str, ...],
    results: list[tuple[RepetitionResult, ConfusionMatrix]],
    state: RunState,
) -> RunReport:
    total = results[0][1]
    for _, cm in results[1:]:
        total = total + cm
    return RunReport(
        descriptor_kind=config.descriptor_kind.value,
        class_names=list(class_names),
        repetitions=[r for r, _ in results],
        confusion=total.counts.tolist(),
        counters=state.counters(),
        failures=list(state.failures),
        config=config.model_dump(mode="json"),
    )


@with_hooks("evaluate")
def run_evaluate(
    config: ExperimentConfig, dataset: LabeledDataset, state: RunState | None = None
) -> RunReport:
    """Repeated stratified splits of fixed features; repetition r uses seed base + r."""
    state = state if state is not None else RunState()
    results = []
    for seed in _repetition_seeds(config):
        train_idx, test_idx = stratified_indices(
            dataset.y, dataset.n_classes, config.test_fraction, seed, dataset.class_names
        )
        results.append(_evaluate_split(config, dataset, train_idx, test_idx, seed))
    return _build_report(config, dataset.class_names, results, state)


def _evaluate_per_run_vocabulary(
    config: ExperimentConfig, shapes: list[ShapeRecord], state: RunState
) -> RunReport:
    """A fresh vocabulary for every repetition, on all shapes or on that split's training shapes."""
    labels = np.array([s.label for s in shapes], dtype=np.intp)
    n_classes = len(state.class_names)
    results = []
    for seed in _repetition_seeds(config):
        train_idx, test_idx = stratified_indices(
            labels, n_classes, config.test_fraction, seed, state.class_names
        )
        vocab_indices = train_idx if config.vocab_scope is VocabularyScope.TRAIN else None
        codebook = run_vocab(config, shapes, vocab_indices, seed=seed, state=state)
        encoded = run_encode(config, shapes, codebook, state=state)
        position = {int(s): j for j, s in enumerate(encoded.shape_indices)}
        train_pos = np.array([position[i] for i in train_idx if i in position], dtype=np.intp)
        test_pos = np.array([position[i] for i in test_idx if i in position], dtype=np.intp)
        results.append(_evaluate_split(config, encoded.dataset, train_pos, test_pos, seed))
    return _build_report(config, state.class_names, results, state)


def write_artifacts(report: RunReport, output_dir: str | Path) -> Path:
    """report.json, confusion.csv and accuracy.csv under *output_dir*."""
    output_dir = Path(output_dir)
    report.write_json(output_dir / "report.json")
    write_csv(output_dir / "confusion.csv", report.class_names, report.confusion)
    write_csv(
        output_dir / "accuracy.csv",
        ["repetition", "seed", "C", "accuracy"],
        [[i + 1, r.seed, r.C, r.accuracy] for i, r in enumerate(report.repetitions)],
    )
    logger.info(f"Wrote report to {output_dir}")
    return output_dir / "report.json"


def _with_timer(run: Callable[[StageTimer], RunReport]) -> RunReport:
    with HookRegistry.get_instance().registered(StageTimer()) as timer:
        report = run(timer)
    return report.model_copy(update={"stage_seconds": timer.snapshot()})


def run_experiment(config: ExperimentConfig, manifest: DatasetManifest | None = None) -> RunReport:
    """describe -> vocab -> encode -> evaluate, then write the report artifacts."""

    def run(timer: StageTimer) -> RunReport:
        state = RunState()
        shapes = run_describe(config, manifest, state=state)
        if make_descriptor(config).needs_vocabulary and config.per_run_vocabulary():
            report = _evaluate_per_run_vocabulary(config, shapes, state)
        else:
            codebook = run_vocab(config, shapes, state=state)
            encoded = run_encode(config, shapes, codebook, state=state)
            report = run_evaluate(config, encoded.dataset, state=state)
        return report.model_copy(update={"counters": state.counters(), "failures": list(state.failures)})

    report = _with_timer(run)
    write_artifacts(report, config.output_dir)
    return report


def run_sweep(
    config: ExperimentConfig, manifest: DatasetManifest | None = None
) -> tuple[list[dict], list[MeshFailure]]:
    """Evaluate every (epsilon, k) cell of the sweep grid; one report per cell plus sweep.csv."""
    if not make_descriptor(config).needs_vocabulary:
        raise ValueError(f"{config.descriptor_kind.value} has no vocabulary or kernel width to sweep")
    state = RunState()
    shapes = run_describe(config, manifest, state=state)
    output_dir = Path(config.output_dir)
    rows = []
    for k in config.sweep_vocab_sizes:
        codebook = run_vocab(config, shapes, vocabulary_size=k, state=state)
        for epsilon in config.sweep_epsilons:
            cell_config = config.model_copy(update={"vocabulary_size": k, "epsilon": epsilon})
            encoded = run_encode(cell_config, shapes, codebook, epsilon=epsilon, state=state)
            report = run_evaluate(cell_config, encoded.dataset, state=state)
            report = report.model_copy(update={"counters": state.counters(), "failures": list(state.failures)})
            report.write_json(output_dir / "sweep" / f"eps={epsilon:g}_k={k}" / "report.json")
            rows.append({"epsilon": epsilon, "k": k, **report.summary()})
    write_csv(
        output_dir / "sweep.csv",
        ["epsilon", "k", "mean_accuracy", "min_accuracy", "max_accuracy"],
        [[r["epsilon"], r["k"], r["mean_accuracy"], r["min_accuracy"], r["max_accuracy"]] for r in rows],
    )
    return rows, list(state.failures)


def run_train(
    config: ExperimentConfig, manifest: DatasetManifest | None = None
) -> tuple[Path, list[MeshFailure]]:
    """Train on every shape and write model.bin (and vocabulary.bin for vocabulary kinds).

    Returns:
        The model path and the meshes left out of training.
    """
    state = RunState()
    shapes = run_describe(config, manifest, state=state)
    codebook = run_vocab(config, shapes, state=state)
    encoded = run_encode(config, shapes, codebook, state=state)
    dataset = encoded.dataset
    C = _choose_c(config, dataset, config.seed)
    model = train_ova_svm(
        dataset, C, config.seed, tol=config.svm_tol, max_epochs=config.svm_max_epochs, workers=config.workers
    )
    output_dir = Path(config.output_dir)
    if codebook is not None:
        with atomic_write(output_dir / "vocabulary.bin", "wb") as handle:
            write_codebook(handle, codebook)
    path = save_model(model, output_dir / "model.bin")
    logger.info(f"Model with {model.n_classes} classes written to {path}")
    return path, list(state.failures)
