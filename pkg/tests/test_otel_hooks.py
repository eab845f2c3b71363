# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""Tests for the OpenTelemetry hook handler."""

import json

import pytest

from sgwc_bof.config import OTEL_FILE_ENV
from sgwc_bof.hooks import HookEvent, HookRegistry, with_hooks
from sgwc_bof.otel_hook import create_otel_handler, maybe_register_otel


@pytest.fixture()
def otel_spans(tmp_path):
    """Create an OTel handler writing to a temp file; return (handler, spans_path)."""
    spans_file = tmp_path / "spans.jsonl"
    handler = create_otel_handler(file_path=spans_file)
    return handler, spans_file


def _read_spans(path):
    """Parse all JSONL spans from *path*."""
    lines = path.read_text().strip().splitlines()
    return [json.loads(line) for line in lines]


# ── Paired spans: pipeline stages ─────────────────────────────────────


class TestStageSpans:
    def test_successful_stage_emits_span(self, otel_spans):
        handler, spans_file = otel_spans
        HookRegistry.get_instance().register(handler)

        @with_hooks("describe")
        def describe():
            return [1, 2, 3]

        describe()

        spans = _read_spans(spans_file)
        assert len(spans) == 1
        span = spans[0]
        assert span["name"] == "stage:describe"
        assert span["attributes"]["stage.name"] == "describe"
        assert "error" not in span["attributes"]
        assert span["start_time"] is not None
        assert span["end_time"] >= span["start_time"]

    def test_failed_stage_records_error(self, otel_spans):
        handler, spans_file = otel_spans
        HookRegistry.get_instance().register(handler)

        @with_hooks("vocab")
        def vocab():
            raise ValueError("Cannot build 128 codewords from 40 descriptors")

        with pytest.raises(ValueError, match="codewords"):
            vocab()

        span = _read_spans(spans_file)[0]
        assert span["name"] == "stage:vocab"
        assert span["attributes"]["error"] is True
        assert "codewords" in span["attributes"]["error.message"]

    def test_nested_stages_emit_separate_spans(self, otel_spans):
        handler, spans_file = otel_spans
        HookRegistry.get_instance().register(handler)

        @with_hooks("encode")
        def encode():
            return None

        @with_hooks("evaluate")
        def evaluate():
            encode()

        evaluate()

        names = [span["name"] for span in _read_spans(spans_file)]
        assert names == ["stage:encode", "stage:evaluate"]


# ── Instant spans: failed meshes ──────────────────────────────────────


class TestMeshFailedSpans:
    def test_mesh_failure_span(self, otel_spans):
        handler, spans_file = otel_spans
        HookRegistry.get_instance().register(handler)

        HookRegistry.get_instance().fire(
            HookEvent.MESH_FAILED, path="shapes/broken.off", stage="describe", error="MeshFormatError: x"
        )

        span = _read_spans(spans_file)[0]
        assert span["name"] == "mesh_failed"
        assert span["attributes"]["mesh.path"] == "shapes/broken.off"
        assert span["attributes"]["stage.name"] == "describe"
        assert span["attributes"]["error.message"] == "MeshFormatError: x"

    def test_failure_inside_stage_is_counted(self, otel_spans):
        handler, spans_file = otel_spans
        registry = HookRegistry.get_instance()
        registry.register(handler)

        @with_hooks("describe")
        def describe():
            for name in ("a.off", "b.off"):
                registry.fire(HookEvent.MESH_FAILED, path=name, stage="describe", error="EigenSolveError: x")

        describe()

        spans = _read_spans(spans_file)
        assert [span["name"] for span in spans] == ["mesh_failed", "mesh_failed", "stage:describe"]
        stage = spans[-1]
        assert stage["attributes"]["stage.failed_meshes"] == 2
        assert [event["attributes"]["mesh.path"] for event in stage["events"]] == ["a.off", "b.off"]

    def test_unknown_event_rejected(self, otel_spans):
        handler, _ = otel_spans
        with pytest.raises(ValueError, match="Unhandled"):
            handler.on_event("not-an-event", context={})


class TestRegistration:
    def test_nothing_registered_without_a_file(self, monkeypatch):
        monkeypatch.delenv(OTEL_FILE_ENV, raising=False)
        assert maybe_register_otel() is None
        HookRegistry.get_instance().fire(HookEvent.BEFORE_STAGE, stage="describe")

    def test_environment_file(self, monkeypatch, tmp_path):
        spans_file = tmp_path / "env_spans.jsonl"
        monkeypatch.setenv(OTEL_FILE_ENV, str(spans_file))
        assert maybe_register_otel() is not None

        @with_hooks("train")
        def train():
            return None

        train()
        assert _read_spans(spans_file)[0]["name"] == "stage:train"
