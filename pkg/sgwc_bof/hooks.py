# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""Pre/post hooks around pipeline stages, plus a per-mesh failure event."""

import logging
import time
from collections import defaultdict
from collections.abc import Iterator
from contextlib import contextmanager
from enum import Enum
from functools import wraps
from typing import ClassVar, Protocol, TypeVar, runtime_checkable

logger = logging.getLogger(__name__)


class HookEvent(str, Enum):
    BEFORE_STAGE = "before_stage"
    AFTER_STAGE = "after_stage"
    MESH_FAILED = "mesh_failed"


@runtime_checkable
class HookHandler(Protocol):
    propagate_errors: bool

    def on_event(self, event: HookEvent, **kwargs) -> None: ...


H = TypeVar("H", bound=HookHandler)


class HookRegistry:
    """Process-wide list of hook handlers, called in registration order.

    A handler with ``propagate_errors=True`` aborts the stage when it raises;
    failures of the other handlers are logged at DEBUG and ignored.
    """

    _instance: ClassVar["HookRegistry | None"] = None

    def __init__(self):
        self._handlers: list[HookHandler] = []

    @classmethod
    def get_instance(cls) -> "HookRegistry":
        if cls._instance is None:
            cls._instance = cls()
        return cls._instance

    @classmethod
    def reset(cls) -> None:
        """Drop the singleton and every handler (for testing)."""
        cls._instance = None

    def register(self, handler: HookHandler) -> None:
        self._handlers.append(handler)

    def unregister(self, handler: HookHandler) -> None:
        self._handlers.remove(handler)

    @contextmanager
    def registered(self, handler: H) -> Iterator[H]:
        """Keep *handler* registered for the duration of a ``with`` block."""
        self.register(handler)
        try:
            yield handler
        finally:
            self.unregister(handler)

    def fire(self, event: HookEvent, **kwargs) -> dict:
        """Deliver *event* to every handler and return the shared context dict.

        BEFORE_STAGE creates the context; pass it back as ``context=`` with the
        matching AFTER_STAGE so handlers can pair the two.
        """
        ctx = kwargs.pop("context", None)
        if ctx is None:
            ctx = {}
        for handler in self._handlers:
            try:
                handler.on_event(event, context=ctx, **kwargs)
            except Exception:
                if handler.propagate_errors:
                    raise
                logger.debug(f"{type(handler).__name__} failed on {event.value}", exc_info=True)
        return ctx


def with_hooks(stage: str):
    """Fire BEFORE_STAGE / AFTER_STAGE around a pipeline stage function.

    AFTER_STAGE carries ``error=None`` on success and the exception otherwise.
    """

    def decorator(fn):
        @wraps(fn)
        def wrapper(*args, **kwargs):
            hooks = HookRegistry.get_instance()
            ctx = hooks.fire(HookEvent.BEFORE_STAGE, stage=stage)
            error = None
            try:
                return fn(*args, **kwargs)
            except Exception as e:
                error = e
                raise
            finally:
                hooks.fire(HookEvent.AFTER_STAGE, stage=stage, error=error, context=ctx)

        return wrapper

    return decorator


class StageTimer:
    """Wall-clock seconds per stage name; repeated stages accumulate."""

    propagate_errors = False

    def __init__(self):
        self.seconds: dict[str, float] = defaultdict(float)

    def on_event(self, event: HookEvent, **kwargs) -> None:
        ctx = kwargs.get("context", {})
        if event == HookEvent.BEFORE_STAGE:
            ctx["_timer_start"] = time.perf_counter()
        elif event == HookEvent.AFTER_STAGE and "_timer_start" in ctx:
            self.seconds[kwargs["stage"]] += time.perf_counter() - ctx["_timer_start"]

    def snapshot(self) -> dict[str, float]:
        return dict(self.seconds)
