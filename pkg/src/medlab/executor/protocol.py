"""Protocol planning: turn the plan and workspace into dataflow-checked stages."""

from __future__ import annotations

from ..gateway import Gateway
from ..ideation.types import ResearchPlan
from .errors import DataflowViolation
from .types import ExecutionProtocol, ResourceLimits, Stage, WorkspaceSpec

STAGE_EXECUTION = "execution"

_PROTOCOL_SCHEMA = {
    "stages": {
        "list": {
            "record": {
                "stage_name": "string",
                "command": "string",
                "declared_inputs": {"list": "string"},
                "declared_outputs": {"list": "string"},
                "timeout_s": "integer",
            }
        }
    }
}


def plan_protocol(
    spec: WorkspaceSpec,
    plan: ResearchPlan,
    gateway: Gateway,
    protocol_id: str = "protocol-1",
    subsample_fraction: float = 0.1,
) -> ExecutionProtocol:
    """Ask for a machine-interpretable stage list and enforce the dataflow invariant."""
    mounts = [m.sandbox_path for m in spec.dataset_mounts]
    system = (
        "You plan an execution protocol as ordered stages from "
        "{preprocess, train, validate, test}. Every declared input must be a dataset "
        "mount or a declared output of an earlier stage; a train stage is mandatory."
    )
    user = (
        f"Plan for: {plan.hypothesis.technical_design}\n"
        f"Metrics: {', '.join(plan.evaluation_protocol.metrics)}\n"
        f"Dataset mounts: {', '.join(mounts)}\n"
        f"Toolboxes: {', '.join(spec.toolbox_ids) or '(none)'}"
    )
    response = gateway.ask(system, user, _PROTOCOL_SCHEMA, STAGE_EXECUTION)
    protocol = _to_protocol(response.content, protocol_id, subsample_fraction)
    violations = protocol.validate_dataflow(mounts)
    if violations:
        response = gateway.ask(
            system,
            user + "\nYour previous protocol had dataflow violations: "
            + "; ".join(violations),
            _PROTOCOL_SCHEMA,
            STAGE_EXECUTION,
        )
        protocol = _to_protocol(response.content, protocol_id, subsample_fraction)
        violations = protocol.validate_dataflow(mounts)
        if violations:
            raise DataflowViolation(violations)
    return protocol


def _to_protocol(content: dict, protocol_id: str, subsample_fraction: float) -> ExecutionProtocol:
    stages = [
        Stage(
            stage_name=s["stage_name"],
            command=s["command"],
            declared_inputs=s["declared_inputs"],
            declared_outputs=s["declared_outputs"],
            timeout_s=s["timeout_s"],
            limits=ResourceLimits(),
        )
        for s in content["stages"]
    ]
    return ExecutionProtocol(
        protocol_id=protocol_id, stages=stages, subsample_fraction=subsample_fraction
    )
