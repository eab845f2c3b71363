# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""OpenTelemetry hook handler: one span per pipeline stage, one per failed mesh."""

from __future__ import annotations

import json
import logging
import os
from collections.abc import Sequence
from pathlib import Path

from opentelemetry import trace
from opentelemetry.sdk.trace import ReadableSpan, TracerProvider
from opentelemetry.sdk.trace.export import SimpleSpanProcessor, SpanExporter, SpanExportResult

from sgwc_bof.config import OTEL_FILE_ENV
from sgwc_bof.hooks import HookEvent, HookRegistry

logger = logging.getLogger(__name__)

MAX_MESSAGE_LENGTH = 200
DEFAULT_SPAN_FILE = "otel_spans.jsonl"


class FileSpanExporter(SpanExporter):
    """Appends finished spans to a JSON-lines file, one compact object per line."""

    def __init__(self, file_path: str | Path):
        self._path = Path(file_path)
        self._path.parent.mkdir(parents=True, exist_ok=True)

    def export(self, spans: Sequence[ReadableSpan]) -> SpanExportResult:
        lines = [json.dumps(json.loads(span.to_json()), separators=(",", ":")) for span in spans]
        try:
            with self._path.open("a") as f:
                f.write("".join(line + "\n" for line in lines))
        except OSError:
            logger.debug(f"Could not append {len(lines)} span(s) to {self._path}", exc_info=True)
            return SpanExportResult.FAILURE
        return SpanExportResult.SUCCESS

    def shutdown(self) -> None:
        pass


class OTelHookHandler:
    """
    Stage spans run from BEFORE_STAGE to AFTER_STAGE and nest like the stages.

    A failed mesh gets its own instant span and is also recorded as an event
    on the innermost open stage span, whose ``stage.failed_meshes`` attribute
    counts them.
    """

    propagate_errors = False

    def __init__(self, tracer: trace.Tracer):
        self._tracer = tracer
        self._open: list[trace.Span] = []
        self._failures: dict[int, int] = {}

    def _start_stage(self, stage: str, context: dict) -> None:
        span = self._tracer.start_span(f"stage:{stage}")
        span.set_attribute("stage.name", stage)
        context["_otel_span"] = span
        self._open.append(span)

    def _end_stage(self, context: dict, error: BaseException | None) -> None:
        span = context["_otel_span"]
        if span in self._open:
            self._open.remove(span)
        span.set_attribute("stage.failed_meshes", self._failures.pop(id(span), 0))
        if error is not None:
            span.set_attribute("error", True)
            span.set_attribute("error.message", f"{type(error).__name__}: {error}"[:MAX_MESSAGE_LENGTH])
        span.end()

    def _mesh_failed(self, path: str, stage: str, error: str) -> None:
        attributes = {
            "mesh.path": path,
            "stage.name": stage,
            "error.message": error[:MAX_MESSAGE_LENGTH],
        }
        self._tracer.start_span("mesh_failed", attributes=attributes).end()
        if self._open:
            current = self._open[-1]
            current.add_event("mesh_failed", attributes=attributes)
            self._failures[id(current)] = self._failures.get(id(current), 0) + 1

    def on_event(self, event: HookEvent, **kwargs) -> None:
        if event == HookEvent.BEFORE_STAGE:
            self._start_stage(kwargs.get("stage", "unknown"), kwargs.get("context", {}))
        elif event == HookEvent.AFTER_STAGE:
            self._end_stage(kwargs["context"], kwargs.get("error"))
        elif event == HookEvent.MESH_FAILED:
            self._mesh_failed(str(kwargs.get("path", "")), kwargs.get("stage", ""), str(kwargs.get("error", "")))
        else:
            raise ValueError(f"Unhandled hook event: {event}")


def create_otel_handler(file_path: str | Path | None = None) -> OTelHookHandler:
    """Handler whose spans go to *file_path*, else ``SGWC_BOF_OTEL_FILE``, else ./otel_spans.jsonl."""
    if file_path is None:
        file_path = os.environ.get(OTEL_FILE_ENV, DEFAULT_SPAN_FILE)
    provider = TracerProvider()
    provider.add_span_processor(SimpleSpanProcessor(FileSpanExporter(file_path)))
    return OTelHookHandler(provider.get_tracer("sgwc_bof"))


def maybe_register_otel(file_path: str | Path | None = None) -> OTelHookHandler | None:
    """Register a span handler when a span file is configured (argument, then environment)."""
    otel_file = file_path or os.environ.get(OTEL_FILE_ENV)
    if not otel_file:
        return None
    handler = create_otel_handler(otel_file)
    HookRegistry.get_instance().register(handler)
    logger.info(f"Writing pipeline spans to {otel_file}")
    return handler
