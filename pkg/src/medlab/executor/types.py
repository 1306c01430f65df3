"""Execution types: workspace specs, protocols, run records, verdicts."""

from __future__ import annotations

import math
import re

from pydantic import BaseModel, Field, model_validator

from ..evidence.types import CodeRecord

STAGE_NAMES = ("preprocess", "train", "validate", "test")
SPLITS = ("train", "val")

_SHA256_RE = re.compile(r"^[0-9a-f]{64}$")


class DatasetMount(BaseModel):
    host_path: str
    sandbox_path: str
    read_only: bool = True


class PackagePin(BaseModel):
    package: str
    constraint: str = ""


class WorkspaceSpec(BaseModel):
    codebase_refs: list[CodeRecord] = Field(default_factory=list)
    toolbox_ids: list[str] = Field(default_factory=list)
    dataset_mounts: list[DatasetMount] = Field(default_factory=list)
    environment_manifest: list[PackagePin] = Field(default_factory=list)
    scaffold: bool = False

    @model_validator(mode="after")
    def _check(self) -> "WorkspaceSpec":
        paths = [m.sandbox_path for m in self.dataset_mounts]
        if any(not p.startswith("/") for p in paths):
            raise ValueError("sandbox mount paths must be absolute")
        if len(paths) != len(set(paths)):
            raise ValueError("sandbox mount paths must be unique")
        return self


class ResourceLimits(BaseModel):
    cpu_count: int = Field(default=1, ge=1)
    memory_bytes: int = Field(default=2 * 1024**3, ge=1)
    accelerator: bool = False


class Stage(BaseModel):
    stage_name: str
    command: str
    declared_inputs: list[str] = Field(default_factory=list)
    declared_outputs: list[str] = Field(default_factory=list)
    timeout_s: int = Field(default=600, ge=1)
    limits: ResourceLimits = Field(default_factory=ResourceLimits)

    @model_validator(mode="after")
    def _check(self) -> "Stage":
        if self.stage_name not in STAGE_NAMES:
            raise ValueError(f"stage_name must be one of {STAGE_NAMES}")
        return self


class ExecutionProtocol(BaseModel):
    protocol_id: str
    stages: list[Stage]
    subsample_fraction: float = Field(default=0.1, gt=0, le=1)

    @model_validator(mode="after")
    def _check(self) -> "ExecutionProtocol":
        names = [s.stage_name for s in self.stages]
        if len(names) != len(set(names)):
            raise ValueError("stage names must be unique")
        if "train" not in names:
            raise ValueError("a train stage is required")
        order = {name: i for i, name in enumerate(STAGE_NAMES)}
        if names != sorted(names, key=lambda n: order[n]):
            raise ValueError(f"stages must follow the canonical order {STAGE_NAMES}")
        return self

    def validate_dataflow(self, mounts: list[str]) -> list[str]:
        """Return dataflow violations: inputs that are neither mounts nor prior outputs."""
        available = set(mounts)
        violations = []
        for stage in self.stages:
            for path in stage.declared_inputs:
                if path not in available:
                    violations.append(f"{stage.stage_name}: input {path!r} is never produced")
            available.update(stage.declared_outputs)
        return violations


class MetricEvent(BaseModel):
    step: int = Field(ge=0)
    split: str
    loss: float
    grad_norm: float | None = None
    extras: dict[str, float] = Field(default_factory=dict)
    ts: str = ""

    model_config = {"ser_json_inf_nan": "strings"}

    @model_validator(mode="after")
    def _check(self) -> "MetricEvent":
        if self.split not in SPLITS:
            raise ValueError(f"split must be one of {SPLITS}")
        return self

    def loss_finite(self) -> bool:
        return math.isfinite(self.loss)

    def grad_finite(self) -> bool:
        return self.grad_norm is None or math.isfinite(self.grad_norm)


class StageOutcome(BaseModel):
    stage_name: str
    exit_status: int
    wall_time_s: float = Field(ge=0)
    timed_out: bool = False


class CaptureRef(BaseModel):
    stage_name: str
    stdout: str
    stderr: str


class WeightEntry(BaseModel):
    path: str
    bytes: int = Field(ge=0)
    sha256: str

    def checksum_well_formed(self) -> bool:
        return bool(_SHA256_RE.match(self.sha256))


class WeightsManifest(BaseModel):
    weights: list[WeightEntry] = Field(default_factory=list)
    final_metrics: dict[str, float] = Field(default_factory=dict)


class RunRecord(BaseModel):
    protocol_id: str
    stage_outcomes: list[StageOutcome]
    metric_events: list[MetricEvent] = Field(default_factory=list)
    captures: list[CaptureRef] = Field(default_factory=list)
    artifacts: list[str] = Field(default_factory=list)
    weights_manifest: WeightsManifest | None = None
    subsample_fraction: float = 0.1

    @model_validator(mode="after")
    def _check(self) -> "RunRecord":
        last_step: dict[str, int] = {}
        for event in self.metric_events:
            previous = last_step.get(event.split)
            if previous is not None and event.step < previous:
                raise ValueError(
                    f"metric events out of order in split {event.split!r}: "
                    f"step {event.step} after {previous}"
                )
            last_step[event.split] = event.step
        return self

    def train_events(self) -> list[MetricEvent]:
        return [e for e in self.metric_events if e.split == "train"]


FAILURE_CLASSES = (
    "runtime_error",
    "timeout",
    "gradient_explosion",
    "non_decreasing_loss",
    "missing_weights",
)


class EvidencePointer(BaseModel):
    log_ref: str
    line_range: tuple[int, int] = (0, 0)


class Verdict(BaseModel):
    status: str
    failure_class: str | None = None
    feedback: str = ""
    evidence_pointers: list[EvidencePointer] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check(self) -> "Verdict":
        if self.status not in ("success", "failure"):
            raise ValueError("status must be success or failure")
        if self.status == "failure":
            if self.failure_class not in FAILURE_CLASSES:
                raise ValueError(f"failure_class must be one of {FAILURE_CLASSES}")
            if not self.feedback:
                raise ValueError("feedback must be non-empty on failure")
        elif self.failure_class is not None:
            raise ValueError("failure_class present iff status=failure")
        return self
