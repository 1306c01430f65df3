"""Corrective repair loop: feedback-driven protocol patching and re-execution."""

from __future__ import annotations

from ..gateway import Gateway
from .errors import RoundsExhausted
from .judge import JudgePolicy, judge_run
from .sandbox import SandboxAdapter, execute_protocol
from .types import ExecutionProtocol, RunRecord, Verdict

STAGE_EXECUTION = "execution"

_PATCH_SCHEMA = {
    "patches": {"list": {"record": {"stage_name": "string", "command": "string"}}},
    "note": "string",
}

DEFAULT_MAX_ROUNDS = 3


def apply_patch(protocol: ExecutionProtocol, patches: list[dict]) -> ExecutionProtocol:
    by_stage = {p["stage_name"]: p["command"] for p in patches}
    stages = [
        stage.model_copy(update={"command": by_stage[stage.stage_name]})
        if stage.stage_name in by_stage
        else stage
        for stage in protocol.stages
    ]
    return protocol.model_copy(update={"stages": stages})


def repair_loop(
    protocol: ExecutionProtocol,
    verdict: Verdict,
    gateway: Gateway,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    sandbox: SandboxAdapter | None = None,
    policy: JudgePolicy | None = None,
) -> tuple[RunRecord, int]:
    """Feed the verdict back, patch, re-execute, and re-judge, round by round."""
    if verdict.status != "failure":
        raise ValueError("repair_loop requires a failure verdict")
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    if sandbox is None:
        raise ValueError("a sandbox adapter is required to re-execute")

    current_protocol = protocol
    current_verdict = verdict
    record: RunRecord | None = None
    for round_index in range(1, max_rounds + 1):
        pointers = "; ".join(
            f"{p.log_ref}:{p.line_range[0]}-{p.line_range[1]}"
            for p in current_verdict.evidence_pointers
        )
        response = gateway.ask(
            "You repair a failing experiment protocol. Patch only the commands that "
            "need to change.",
            f"Failure class: {current_verdict.failure_class}\n"
            f"Feedback: {current_verdict.feedback}\n"
            f"Evidence: {pointers or '(none)'}\n"
            "Current stages:\n"
            + "\n".join(f"- {s.stage_name}: {s.command}" for s in current_protocol.stages),
            _PATCH_SCHEMA,
            STAGE_EXECUTION,
        )
        current_protocol = apply_patch(current_protocol, response.content["patches"])
        record = execute_protocol(current_protocol, sandbox)
        current_verdict = judge_run(record, policy)
        if current_verdict.status == "success":
            return record, round_index
    assert record is not None
    raise RoundsExhausted(record, current_verdict, max_rounds)
