"""trainshim: in-sandbox instrumentation for experiment runs.

Instrumented scripts call emit() and write_manifest(); uninstrumented
commands are wrapped by the trainshim CLI, optionally scraping stdout.
"""

from .emitter import MetricEmitter, emit, format_line
from .errors import (
    MissingWeightFile,
    SchemaError,
    ShimError,
    SpawnFailure,
    WorkspaceUnwritable,
)
from .manifest import write_manifest
from .scrape import ScrapeConfig, ScrapePattern, scrape_line, scrape_stdout
from .wrapper import wrap_entrypoint

__all__ = [
    "MetricEmitter",
    "MissingWeightFile",
    "SchemaError",
    "ScrapeConfig",
    "ScrapePattern",
    "ShimError",
    "SpawnFailure",
    "WorkspaceUnwritable",
    "emit",
    "format_line",
    "scrape_line",
    "scrape_stdout",
    "wrap_entrypoint",
    "write_manifest",
]
