"""Metric-line emission: one schema-valid JSON object per line.

Wire format (owned by the executor's parser):
{"event":"metric","step":<int>,"split":"train"|"val","loss":<number|"NaN">,
 "grad_norm":<number|"NaN"|null>,"extras":{...},"ts":"<RFC3339>"}

Every line is flushed as it is written, so a killed run always leaves a
parseable prefix.
"""

from __future__ import annotations

import datetime
import json
import math
import os
from pathlib import Path

from .errors import SchemaError

METRICS_RELPATH = Path("logs") / "metrics.jsonl"
WORKSPACE_ENV = "TRAINSHIM_DIR"

SPLITS = ("train", "val")


def _encode(value):
    if value is None:
        return None
    value = float(value)
    if math.isnan(value):
        return "NaN"
    return value


def format_line(step, split, loss, grad_norm=None, extras=None, ts=None) -> str:
    if not isinstance(step, int) or step < 0:
        raise SchemaError(f"step must be a non-negative integer, got {step!r}")
    if split not in SPLITS:
        raise SchemaError(f"split must be one of {SPLITS}, got {split!r}")
    if loss is None:
        raise SchemaError("loss is required")
    payload = {
        "event": "metric",
        "step": step,
        "split": split,
        "loss": _encode(loss),
        "grad_norm": _encode(grad_norm),
        "extras": {k: float(v) for k, v in (extras or {}).items()},
        "ts": ts if ts is not None else _now(),
    }
    return json.dumps(payload, sort_keys=True)


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def default_workspace() -> Path:
    return Path(os.environ.get(WORKSPACE_ENV, "."))


class MetricEmitter:
    """Appends metric lines to <workspace>/logs/metrics.jsonl."""

    def __init__(self, workspace_dir: str | Path | None = None):
        self.workspace = Path(workspace_dir) if workspace_dir else default_workspace()
        self.path = self.workspace / METRICS_RELPATH
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._handle = open(self.path, "a", encoding="utf-8")

    def emit(self, step, split, loss, grad_norm=None, extras=None, ts=None) -> str:
        line = format_line(step, split, loss, grad_norm=grad_norm, extras=extras, ts=ts)
        self._handle.write(line + "\n")
        self._handle.flush()
        os.fsync(self._handle.fileno())
        return line

    def close(self) -> None:
        self._handle.close()


_default: MetricEmitter | None = None


def emit(step, split, loss, grad_norm=None, extras=None, ts=None) -> str:
    """Module-level emit for instrumented training scripts."""
    global _default
    if _default is None:
        _default = MetricEmitter()
    return _default.emit(step, split, loss, grad_norm=grad_norm, extras=extras, ts=ts)
