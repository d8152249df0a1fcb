"""
OpenTelemetry span helpers for the kissing-number pipeline.
"""

import os
import logging
from contextlib import contextmanager
from functools import wraps
from typing import Any, Callable, Dict, Optional

from opentelemetry import trace
from opentelemetry.sdk.resources import Resource
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import BatchSpanProcessor, ConsoleSpanExporter, SimpleSpanProcessor
from opentelemetry.trace import Span, Status, StatusCode

logger = logging.getLogger(__name__)

_PRIMITIVES = (str, bool, int, float)


def _clean(attributes: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    # OpenTelemetry only accepts primitive attribute values
    return {k: v if isinstance(v, _PRIMITIVES) else str(v) for k, v in (attributes or {}).items()}


class KissnumTracer:
    """Tracer with a span context manager and a function decorator."""

    def __init__(self, service_name: str = "kissnum", environment: str = "development"):
        self.service_name = service_name
        self.environment = environment
        self.tracer_provider = TracerProvider(resource=Resource.create({'service.name': service_name}))
        self._setup_exporters()
        self.tracer = self.tracer_provider.get_tracer(service_name)

    def _setup_exporters(self):
        if os.getenv('OTLP_ENDPOINT'):
            try:
                from opentelemetry.exporter.otlp.proto.grpc.trace_exporter import OTLPSpanExporter
                exporter = OTLPSpanExporter(
                    endpoint=os.getenv('OTLP_ENDPOINT'),
                    headers={'Authorization': f"Bearer {os.getenv('OTLP_API_KEY', '')}"},
                )
                self.tracer_provider.add_span_processor(BatchSpanProcessor(exporter))
            except Exception as e:
                logger.warning(f"Failed to initialize OTLP exporter: {e}")
        if os.getenv('TRACING_CONSOLE', 'false').lower() == 'true':
            self.tracer_provider.add_span_processor(SimpleSpanProcessor(ConsoleSpanExporter()))

    def get_current_span(self) -> Optional[Span]:
        return trace.get_current_span()

    @contextmanager
    def span(self, name: str, attributes: Optional[Dict[str, Any]] = None):
        attributes = _clean(attributes)
        attributes['service.environment'] = self.environment
        with self.tracer.start_as_current_span(name, attributes=attributes) as span:
            try:
                yield span
            except Exception as e:
                span.set_status(Status(StatusCode.ERROR, str(e)))
                span.record_exception(e)
                raise

    def add_metadata(self, key: str, value: Any, span: Optional[Span] = None):
        target_span = span or self.get_current_span()
        if target_span:
            target_span.set_attribute(key, value if isinstance(value, _PRIMITIVES) else str(value))

    def trace_function(self, name: Optional[str] = None, attributes: Optional[Dict[str, Any]] = None):
        """Decorator opening a span around each call."""
        def decorator(func: Callable):
            @wraps(func)
            def wrapper(*args, **kwargs):
                span_name = name or f"{func.__module__}.{func.__name__}"
                func_attributes = dict(attributes or {})
                func_attributes.update({
                    'function.name': func.__name__,
                    'function.module': func.__module__,
                })
                with self.span(span_name, func_attributes) as span:
                    result = func(*args, **kwargs)
                    span.set_status(Status(StatusCode.OK))
                    return result
            return wrapper
        return decorator


# Global tracer instance
tracer = KissnumTracer(environment=os.getenv('ENVIRONMENT', 'development'))
