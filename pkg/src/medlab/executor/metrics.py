"""The metrics-stream and weights-manifest wire formats.

This module owns the contract with the in-sandbox runner shim:
logs/metrics.jsonl holds one JSON object per line with NaN serialized as
the string sentinel "NaN"; logs/weights_manifest.json follows the
WeightsManifest schema. Truncated trailing lines are tolerated so a
killed run still yields a valid prefix.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .types import MetricEvent, WeightsManifest

METRICS_FILENAME = "logs/metrics.jsonl"
MANIFEST_FILENAME = "logs/weights_manifest.json"


def _decode_number(value) -> float | None:
    if value is None:
        return None
    if isinstance(value, str):
        if value == "NaN":
            return math.nan
        raise ValueError(f"unexpected string metric value {value!r}")
    return float(value)


def parse_metric_line(line: str) -> MetricEvent | None:
    """Parse one metrics line; None for blank or non-metric events."""
    stripped = line.strip()
    if not stripped:
        return None
    obj = json.loads(stripped)
    if obj.get("event") != "metric":
        return None
    loss = _decode_number(obj["loss"])
    if loss is None:
        raise ValueError("loss is required on metric events")
    return MetricEvent(
        step=obj["step"],
        split=obj["split"],
        loss=loss,
        grad_norm=_decode_number(obj.get("grad_norm")),
        extras={k: float(v) for k, v in (obj.get("extras") or {}).items()},
        ts=obj.get("ts", ""),
    )


def parse_metrics_stream(path: str | Path) -> list[MetricEvent]:
    """Parse a metrics file, ignoring an incomplete final line."""
    path = Path(path)
    if not path.exists():
        return []
    events: list[MetricEvent] = []
    raw = path.read_text("utf-8")
    lines = raw.split("\n")
    complete = lines[:-1] if raw and not raw.endswith("\n") else lines
    for line in complete:
        event = parse_metric_line(line)
        if event is not None:
            events.append(event)
    return events


def format_metric_line(event: MetricEvent) -> str:
    """Serialize an event to the exact wire format the shim emits."""

    def encode(value: float | None):
        if value is None:
            return None
        if math.isnan(value):
            return "NaN"
        return value

    payload = {
        "event": "metric",
        "step": event.step,
        "split": event.split,
        "loss": encode(event.loss),
        "grad_norm": encode(event.grad_norm),
        "extras": event.extras,
        "ts": event.ts,
    }
    return json.dumps(payload, sort_keys=True)


def load_weights_manifest(path: str | Path) -> WeightsManifest | None:
    path = Path(path)
    if not path.exists():
        return None
    return WeightsManifest.model_validate(json.loads(path.read_text("utf-8")))
