"""OpenTelemetry tracing for commands and batch runs.

Azure Monitor is used when APPLICATIONINSIGHTS_CONNECTION_STRING is set, the
console exporter when FKPROBE_TRACE_CONSOLE=1; otherwise spans are no-ops.
"""

from __future__ import annotations

import logging
import sys
from contextlib import contextmanager
from typing import Any, Iterator

from opentelemetry import trace
from opentelemetry.trace import SpanKind
from opentelemetry.trace.span import format_trace_id

logger = logging.getLogger(__name__)

TRACER_NAME = "fkprobe"
_tracing_ready = False


def configure_tracing(connection_string: str = "", console: bool = False) -> None:
    global _tracing_ready
    if _tracing_ready:
        return
    if connection_string:
        from azure.monitor.opentelemetry import configure_azure_monitor

        configure_azure_monitor(connection_string=connection_string)
        logger.info("span export: azure monitor")
    elif console:
        from opentelemetry.sdk.trace import TracerProvider
        from opentelemetry.sdk.trace.export import ConsoleSpanExporter, SimpleSpanProcessor

        provider = TracerProvider()
        provider.add_span_processor(SimpleSpanProcessor(ConsoleSpanExporter(out=sys.stderr)))
        trace.set_tracer_provider(provider)
        logger.info("span export: console")
    _tracing_ready = True


def get_tracer() -> trace.Tracer:
    return trace.get_tracer(TRACER_NAME)


def _attribute(value: Any) -> Any:
    if isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, (list, tuple)) and all(isinstance(item, (int, float)) for item in value):
        return [float(item) for item in value]
    return str(value)


@contextmanager
def traced(name: str, *, announce: bool = False, kind: SpanKind = SpanKind.INTERNAL, **attributes: Any) -> Iterator[trace.Span]:
    with get_tracer().start_as_current_span(name, kind=kind) as current_span:
        for key, value in attributes.items():
            current_span.set_attribute(key, _attribute(value))
        context = current_span.get_span_context()
        if announce and context.is_valid:
            logger.info("Trace ID: %s", format_trace_id(context.trace_id))
        yield current_span
