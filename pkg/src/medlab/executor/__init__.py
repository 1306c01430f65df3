"""Experimental executor: workspace, protocol, sandboxed runs, judging, repair."""

from .errors import (
    ConflictingConstraint,
    DataflowViolation,
    ExecutorError,
    NoValidatedRun,
    RoundsExhausted,
    SandboxUnavailable,
    UnknownToolbox,
)
from .judge import JudgePolicy, judge_run, least_squares_slope, loss_trend_ok, moving_average
from .metrics import (
    MANIFEST_FILENAME,
    METRICS_FILENAME,
    format_metric_line,
    load_weights_manifest,
    parse_metric_line,
    parse_metrics_stream,
)
from .protocol import plan_protocol
from .repair import DEFAULT_MAX_ROUNDS, apply_patch, repair_loop
from .results import LossSeries, MetricCell, StructuredResults, consolidate_results
from .sandbox import (
    ContainerSandbox,
    LocalProcessSandbox,
    SandboxAdapter,
    ScriptedSandbox,
    StageResult,
    execute_protocol,
    list_artifacts,
)
from .toolbox import Toolbox, get_toolbox, merge_manifests, toolboxes_for_modality
from .types import (
    CaptureRef,
    DatasetMount,
    EvidencePointer,
    ExecutionProtocol,
    FAILURE_CLASSES,
    MetricEvent,
    PackagePin,
    ResourceLimits,
    RunRecord,
    Stage,
    StageOutcome,
    Verdict,
    WeightEntry,
    WeightsManifest,
    WorkspaceSpec,
)
from .workspace import investigate_workspace

__all__ = [
    "CaptureRef",
    "ConflictingConstraint",
    "ContainerSandbox",
    "DEFAULT_MAX_ROUNDS",
    "DataflowViolation",
    "DatasetMount",
    "EvidencePointer",
    "ExecutionProtocol",
    "ExecutorError",
    "FAILURE_CLASSES",
    "JudgePolicy",
    "LocalProcessSandbox",
    "LossSeries",
    "MANIFEST_FILENAME",
    "METRICS_FILENAME",
    "MetricCell",
    "MetricEvent",
    "NoValidatedRun",
    "PackagePin",
    "ResourceLimits",
    "RoundsExhausted",
    "RunRecord",
    "SandboxAdapter",
    "SandboxUnavailable",
    "ScriptedSandbox",
    "Stage",
    "StageOutcome",
    "StageResult",
    "StructuredResults",
    "Toolbox",
    "UnknownToolbox",
    "Verdict",
    "WeightEntry",
    "WeightsManifest",
    "WorkspaceSpec",
    "apply_patch",
    "consolidate_results",
    "execute_protocol",
    "format_metric_line",
    "get_toolbox",
    "investigate_workspace",
    "judge_run",
    "least_squares_slope",
    "list_artifacts",
    "load_weights_manifest",
    "loss_trend_ok",
    "merge_manifests",
    "moving_average",
    "parse_metric_line",
    "parse_metrics_stream",
    "plan_protocol",
    "repair_loop",
    "toolboxes_for_modality",
]
