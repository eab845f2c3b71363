# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from sgwc_bof.mesh import MeshFormat
from sgwc_bof.utils import atomic_write, format_TSV


class ManifestEntry(BaseModel):
    path: Path
    class_name: str


class DatasetManifest(BaseModel):
    """Shapes and their classes; class indices follow sorted class names."""

    entries: list[ManifestEntry]

    @model_validator(mode="after")
    def _at_least_two_classes(self) -> DatasetManifest:
        if len(self.class_names) < 2:
            raise ValueError(f"A manifest needs at least 2 classes, found {self.class_names}")
        return self

    @property
    def class_names(self) -> list[str]:
        return sorted({entry.class_name for entry in self.entries})

    @property
    def class_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.class_names)}

    @property
    def labels(self) -> np.ndarray:
        index = self.class_index
        return np.array([index[entry.class_name] for entry in self.entries], dtype=np.intp)

    def __len__(self) -> int:
        return len(self.entries)

    def check_paths(self) -> None:
        missing = [str(e.path) for e in self.entries if not e.path.is_file()]
        if missing:
            raise FileNotFoundError(f"{len(missing)} manifest path(s) do not exist: {missing[:5]}")

    @classmethod
    def from_csv(cls, path: str | Path) -> DatasetManifest:
        """One ``path,class`` line per shape; relative paths resolve against the manifest directory."""
        path = Path(path)
        entries = []
        with path.open(newline="") as handle:
            for number, row in enumerate(csv.reader(handle), start=1):
                if not row or row[0].startswith("#"):
                    continue
                if number == 1 and [c.strip().lower() for c in row] == ["path", "class"]:
                    continue
                if len(row) != 2:
                    raise ValueError(f"{path}:{number}: expected 'path,class', got {row}")
                mesh_path = Path(row[0].strip())
                if not mesh_path.is_absolute():
                    mesh_path = path.parent / mesh_path
                entries.append(ManifestEntry(path=mesh_path, class_name=row[1].strip()))
        manifest = cls(entries=entries)
        manifest.check_paths()
        return manifest

    @classmethod
    def from_directory(cls, root: str | Path) -> DatasetManifest:
        """Every subdirectory is a class; every OFF/OBJ file inside is a shape."""
        root = Path(root)
        suffixes = {f".{fmt.value}" for fmt in MeshFormat}
        entries = [
            ManifestEntry(path=mesh_path, class_name=class_dir.name)
            for class_dir in sorted(p for p in root.iterdir() if p.is_dir())
            for mesh_path in sorted(class_dir.iterdir())
            if mesh_path.suffix.lower() in suffixes
        ]
        return cls(entries=entries)

    @classmethod
    def load(cls, source: str | Path) -> DatasetManifest:
        source = Path(source)
        return cls.from_directory(source) if source.is_dir() else cls.from_csv(source)

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        with atomic_write(path, "w") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["path", "class"])
            for entry in self.entries:
                try:
                    relative = entry.path.relative_to(path.parent)
                except ValueError:
                    relative = entry.path
                writer.writerow([relative.as_posix(), entry.class_name])
        return path


class MeshFailure(BaseModel):
    path: str
    stage: str
    error: str


class RepetitionResult(BaseModel):
    seed: int
    C: float
    accuracy: float = Field(ge=0.0, le=1.0)
    confusion: list[list[int]]


class RunReport(BaseModel):
    """Everything one evaluation produced, serialized as report.json."""

    descriptor_kind: str
    class_names: list[str]
    repetitions: list[RepetitionResult]
    confusion: list[list[int]] = Field(description="Sum of the per-repetition confusion matrices")
    stage_seconds: dict[str, float] = Field(default_factory=dict)
    counters: dict[str, int] = Field(default_factory=dict)
    failures: list[MeshFailure] = Field(default_factory=list)
    config: dict[str, Any] = Field(default_factory=dict)

    @field_validator("repetitions")
    @classmethod
    def _non_empty(cls, values: list[RepetitionResult]) -> list[RepetitionResult]:
        if not values:
            raise ValueError("A report needs at least one repetition")
        return values

    @property
    def accuracies(self) -> list[float]:
        return [r.accuracy for r in self.repetitions]

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.accuracies))

    @property
    def min_accuracy(self) -> float:
        return min(self.accuracies)

    @property
    def max_accuracy(self) -> float:
        return max(self.accuracies)

    def summary(self) -> dict[str, Any]:
        return {
            "descriptor_kind": self.descriptor_kind,
            "repetitions": len(self.repetitions),
            "mean_accuracy": self.mean_accuracy,
            "min_accuracy": self.min_accuracy,
            "max_accuracy": self.max_accuracy,
            "failures": len(self.failures),
        }

    def write_json(self, path: str | Path) -> Path:
        document = self.model_dump(mode="json")
        document["summary"] = self.summary()
        with atomic_write(path, "w") as handle:
            json.dump(document, handle, indent=2)
        return Path(path)

    @classmethod
    def read_json(cls, path: str | Path) -> RunReport:
        with open(path) as handle:
            document = json.load(handle)
        document.pop("summary", None)
        return cls.model_validate(document)

    def to_tsv(self) -> str:
        rows = [[i + 1, r.seed, r.C, f"{r.accuracy:.4f}"] for i, r in enumerate(self.repetitions)]
        rows.append(["mean", "", "", f"{self.mean_accuracy:.4f}"])
        rows.append(["min", "", "", f"{self.min_accuracy:.4f}"])
        rows.append(["max", "", "", f"{self.max_accuracy:.4f}"])
        return format_TSV(["repetition", "seed", "C", "accuracy"], rows)
