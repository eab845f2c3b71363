# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""
One-vs-all linear SVM and the evaluation primitives around it.

Labels are 0-based class indices internally; class names travel alongside in
:class:`LabeledDataset` and :class:`OvaSvmModel`. Each binary problem is an
L2-regularized hinge-loss SVM with the bias folded in as a constant feature,
solved by dual coordinate descent over the n x n Gram matrix.
"""

from __future__ import annotations

import logging
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from sgwc_bof.utils import atomic_write, read_array, read_header, write_header

logger = logging.getLogger(__name__)

# per-sample dual bound is C / n
DEFAULT_C = 1e4
C_GRID = (1e2, 1e3, 1e4, 1e5)
DEFAULT_TOL = 1e-6
DEFAULT_MAX_EPOCHS = 1000
DEFAULT_FOLDS = 5

MODEL_MAGIC = b"SGWCSVM\x00"
MODEL_VERSION = 1
_MODEL_META = struct.Struct("<QQdq")


@dataclass(frozen=True)
class LabeledDataset:
    """d x n feature matrix (one column per shape) with 0-based labels."""

    X: np.ndarray
    y: np.ndarray
    class_names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "X", np.asarray(self.X, dtype=np.float64))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=np.intp))
        object.__setattr__(self, "class_names", tuple(self.class_names))
        if self.X.ndim != 2:
            raise ValueError(f"X must be a d x n matrix, got shape {self.X.shape}")
        if self.y.shape != (self.X.shape[1],):
            raise ValueError(f"{self.y.size} labels for {self.X.shape[1]} feature columns")
        if self.y.size and (self.y.min() < 0 or self.y.max() >= len(self.class_names)):
            raise ValueError(f"Labels must lie in [0, {len(self.class_names) - 1}]")

    @property
    def n_samples(self) -> int:
        return int(self.y.size)

    @property
    def n_features(self) -> int:
        return int(self.X.shape[0])

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def subset(self, indices) -> LabeledDataset:
        indices = np.asarray(indices, dtype=np.intp)
        return LabeledDataset(self.X[:, indices], self.y[indices], self.class_names)


@dataclass(frozen=True)
class OvaSvmModel:
    """One hyperplane per class: ``weights`` is K x d, ``biases`` has length K."""

    weights: np.ndarray
    biases: np.ndarray
    C: float
    seed: int
    class_names: tuple[str, ...]
    epochs: tuple[int, ...] = field(default=())

    @property
    def n_classes(self) -> int:
        return int(self.weights.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.weights.shape[1])

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        """K x n decision values w_i^T x + b_i for the columns of X."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        if X.shape[0] != self.n_features:
            raise ValueError(f"Feature length {X.shape[0]} does not match model dimension {self.n_features}")
        return self.weights @ X + self.biases[:, None]


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are actual classes, columns predicted classes."""

    counts: np.ndarray

    @property
    def n_classes(self) -> int:
        return int(self.counts.shape[0])

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __add__(self, other: ConfusionMatrix) -> ConfusionMatrix:
        return ConfusionMatrix(self.counts + other.counts)


def _class_members(y: np.ndarray, n_classes: int) -> list[np.ndarray]:
    return [np.flatnonzero(y == c) for c in range(n_classes)]


def stratified_indices(
    y: np.ndarray, n_classes: int, test_fraction: float, seed: int, class_names=None
) -> tuple[np.ndarray, np.ndarray]:
    """Sorted (train, test) sample indices of a per-class random split.

    Each class sends round(test_fraction * size) samples to test, halves rounding
    up, with the count kept in [1, size - 1] so every class appears on both sides.

    Raises:
        ValueError: When the fraction is outside (0, 1) or a class has fewer than 2 members.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for c, members in enumerate(_class_members(np.asarray(y), n_classes)):
        size = members.size
        if size < 2:
            name = class_names[c] if class_names is not None else c
            raise ValueError(f"Class {name!r} has {size} member(s); at least 2 are needed to stratify")
        n_test = int(np.floor(test_fraction * size + 0.5))
        n_test = min(max(n_test, 1), size - 1)
        shuffled = rng.permutation(members)
        test_idx.append(shuffled[:n_test])
        train_idx.append(shuffled[n_test:])
    return np.sort(np.concatenate(train_idx)), np.sort(np.concatenate(test_idx))


def stratified_split(
    dataset: LabeledDataset, test_fraction: float, seed: int
) -> tuple[LabeledDataset, LabeledDataset]:
    """Per-class random split of *dataset*; see :func:`stratified_indices`."""
    train, test = stratified_indices(
        dataset.y, dataset.n_classes, test_fraction, seed, dataset.class_names
    )
    return dataset.subset(train), dataset.subset(test)


def _dual_cd(
    gram: np.ndarray,
    signs: np.ndarray,
    upper: float,
    rng: np.random.Generator,
    tol: float,
    max_epochs: int,
) -> tuple[np.ndarray, int]:
    """Dual coordinate descent for min 1/2 a^T Q a - 1^T a, 0 <= a <= upper.

    Q_ij = y_i y_j (x_i^T x_j + 1). Stops when the largest projected-gradient
    violation of an epoch drops below *tol*.
    """
    n = signs.size
    Q = signs[:, None] * gram * signs[None, :]
    diag = np.diag(Q).copy()
    alpha = np.zeros(n)
    Qa = np.zeros(n)
    for epoch in range(1, max_epochs + 1):
        violation = 0.0
        for i in rng.permutation(n):
            G = Qa[i] - 1.0
            if alpha[i] <= 0.0:
                projected = min(G, 0.0)
            elif alpha[i] >= upper:
                projected = max(G, 0.0)
            else:
                projected = G
            violation = max(violation, abs(projected))
            if projected != 0.0 and diag[i] > 0.0:
                new = min(max(alpha[i] - G / diag[i], 0.0), upper)
                delta = new - alpha[i]
                if delta != 0.0:
                    Qa += delta * Q[:, i]
                    alpha[i] = new
        if violation < tol:
            return alpha, epoch
    logger.warning(f"Dual coordinate descent stopped at {max_epochs} epochs (violation {violation:.2e})")
    return alpha, max_epochs


def _train_binary(
    X: np.ndarray, gram: np.ndarray, positive: np.ndarray, C: float, seed: int, tol: float, max_epochs: int
) -> tuple[np.ndarray, float, int]:
    signs = np.where(positive, 1.0, -1.0)
    rng = np.random.default_rng(seed)
    alpha, epochs = _dual_cd(gram, signs, C / signs.size, rng, tol, max_epochs)
    coef = alpha * signs
    return X @ coef, float(coef.sum()), epochs


def train_ova_svm(
    train: LabeledDataset,
    C: float = DEFAULT_C,
    seed: int = 0,
    *,
    tol: float = DEFAULT_TOL,
    max_epochs: int = DEFAULT_MAX_EPOCHS,
    workers: int = 1,
) -> OvaSvmModel:
    """Train one class-vs-rest linear SVM per class.

    The objective is 1/2 ||w||^2 + 1/2 b^2 + (C / n) sum_i hinge(y_i (w^T x_i + b)),
    so duplicating every sample leaves the optimum unchanged.

    Raises:
        ValueError: On fewer than 2 classes present, C <= 0 or non-finite features.
    """
    if not C > 0:
        raise ValueError(f"C must be positive, got {C}")
    present = np.unique(train.y)
    if present.size < 2:
        raise ValueError(f"Training data holds {present.size} class(es); at least 2 are needed")
    if not np.all(np.isfinite(train.X)):
        raise ValueError("Training features contain non-finite values")

    X = train.X
    gram = X.T @ X + 1.0

    def solve(c: int) -> tuple[np.ndarray, float, int]:
        return _train_binary(X, gram, train.y == c, C, seed + c, tol, max_epochs)

    classes = range(train.n_classes)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(solve, classes))
    else:
        results = [solve(c) for c in classes]

    weights = np.vstack([r[0] for r in results])
    biases = np.array([r[1] for r in results])
    epochs = tuple(r[2] for r in results)
    logger.debug(f"Trained {train.n_classes} binary SVMs (C={C}); epochs {epochs}")
    return OvaSvmModel(
        weights=weights, biases=biases, C=C, seed=seed, class_names=train.class_names, epochs=epochs
    )


def predict(model: OvaSvmModel, x: np.ndarray) -> int:
    """Winning class index; ties go to the lowest index."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.n_features,):
        raise ValueError(f"Feature length {x.shape} does not match model dimension {model.n_features}")
    return int(np.argmax(model.decision_function(x)[:, 0]))


def predict_many(model: OvaSvmModel, X: np.ndarray) -> np.ndarray:
    return np.argmax(model.decision_function(X), axis=0)


def confusion_matrix(actual, predicted, n_classes: int) -> ConfusionMatrix:
    actual = np.asarray(actual, dtype=np.intp)
    predicted = np.asarray(predicted, dtype=np.intp)
    if actual.shape != predicted.shape:
        raise ValueError(f"{actual.size} actual labels vs {predicted.size} predicted labels")
    for name, labels in (("actual", actual), ("predicted", predicted)):
        if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
            raise ValueError(f"{name} labels must lie in [0, {n_classes - 1}]")
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (actual, predicted), 1)
    return ConfusionMatrix(counts)


def accuracy(cm: ConfusionMatrix) -> float:
    total = cm.total
    if total == 0:
        raise ValueError("Accuracy of an empty confusion matrix is undefined")
    return float(np.trace(cm.counts)) / total


def error_rate(cm: ConfusionMatrix) -> float:
    return 1.0 - accuracy(cm)


def _stratified_folds(y: np.ndarray, n_classes: int, folds: int, rng: np.random.Generator) -> np.ndarray:
    assignment = np.empty(y.size, dtype=np.intp)
    for members in _class_members(y, n_classes):
        assignment[rng.permutation(members)] = np.arange(members.size) % folds
    return assignment


def select_c(
    train: LabeledDataset,
    grid=C_GRID,
    folds: int = DEFAULT_FOLDS,
    seed: int = 0,
    **svm_options,
) -> float:
    """Pick C from *grid* by stratified k-fold cross-validated accuracy; ties keep the first value.

    The fold count is reduced to the smallest class size when a class is too small.
    """
    grid = tuple(grid)
    if not grid:
        raise ValueError("C grid is empty")
    if len(grid) == 1:
        return float(grid[0])
    sizes = np.bincount(train.y, minlength=train.n_classes)
    folds = int(min(folds, sizes[sizes > 0].min()))
    if folds < 2:
        logger.warning("Too few samples per class for cross-validation; using the first C")
        return float(grid[0])

    assignment = _stratified_folds(train.y, train.n_classes, folds, np.random.default_rng(seed))
    best_c, best_score = float(grid[0]), -1.0
    for C in grid:
        total = ConfusionMatrix(np.zeros((train.n_classes,) * 2, dtype=np.int64))
        for fold in range(folds):
            held_out = assignment == fold
            model = train_ova_svm(train.subset(np.flatnonzero(~held_out)), C, seed, **svm_options)
            test = train.subset(np.flatnonzero(held_out))
            total = total + confusion_matrix(test.y, predict_many(model, test.X), train.n_classes)
        score = accuracy(total)
        logger.debug(f"C={C}: {folds}-fold accuracy {score:.4f}")
        if score > best_score:
            best_c, best_score = float(C), score
    logger.info(f"Selected C={best_c} (cross-validated accuracy {best_score:.4f})")
    return best_c


def save_model(model: OvaSvmModel, path: str | Path) -> Path:
    """Header, (K, d, C, seed), per-class weights then bias, length-prefixed UTF-8 class names."""
    with atomic_write(path, "wb") as handle:
        write_header(handle, MODEL_MAGIC, MODEL_VERSION)
        handle.write(_MODEL_META.pack(model.n_classes, model.n_features, model.C, model.seed))
        for w, b in zip(model.weights, model.biases, strict=True):
            handle.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            handle.write(struct.pack("<d", b))
        for name in model.class_names:
            encoded = name.encode("utf-8")
            handle.write(struct.pack("<I", len(encoded)))
            handle.write(encoded)
    return Path(path)


def load_model(path: str | Path) -> OvaSvmModel:
    with open(path, "rb") as handle:
        read_header(handle, MODEL_MAGIC, MODEL_VERSION)
        n_classes, n_features, C, seed = _MODEL_META.unpack(handle.read(_MODEL_META.size))
        rows = read_array(handle, n_classes * (n_features + 1)).reshape(n_classes, n_features + 1)
        names = []
        for _ in range(n_classes):
            (length,) = struct.unpack("<I", handle.read(4))
            names.append(handle.read(length).decode("utf-8"))
    return OvaSvmModel(
        weights=rows[:, :n_features].copy(),
        biases=rows[:, n_features].copy(),
        C=C,
        seed=seed,
        class_names=tuple(names),
    )
