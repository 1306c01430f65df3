"""Ethics gatekeeping: deterministic pattern screen, then a judge screen."""

from __future__ import annotations

import json
import re

from pydantic import BaseModel, Field

from .._data import read_data_text
from ..gateway import Gateway
from ..types import TaskInput

STAGE_GATE = "gate"

_GATE_SCHEMA = {"violation": "boolean", "reasons": {"list": "string"}}


class GatePolicy(BaseModel):
    patterns: list[str] = Field(default_factory=list)
    use_judge: bool = True


class GateResult(BaseModel):
    passed: bool
    reasons: list[str] = Field(default_factory=list)


def load_default_policy() -> GatePolicy:
    payload = json.loads(read_data_text("ethics_policy.json"))
    return GatePolicy(patterns=payload["harmful_patterns"])


def gate_ethics(task_input: TaskInput, gateway: Gateway, policy: GatePolicy) -> GateResult:
    """Pattern screen first; only pattern-clean inputs reach the judge."""
    text = " ".join(
        part
        for part in (
            task_input.instructions,
            task_input.method_description,
            task_input.dataset.description if task_input.dataset else "",
        )
        if part
    )
    for pattern in policy.patterns:
        if re.search(pattern, text, re.IGNORECASE):
            return GateResult(passed=False, reasons=[f"matched harmful pattern: {pattern}"])

    if not policy.use_judge:
        return GateResult(passed=True)

    response = gateway.ask(
        "You are an ethics screen for medical AI research tasks. Flag requests that "
        "would cause patient harm, violate consent, or breach research ethics.",
        f"Task under review:\n{text}",
        _GATE_SCHEMA,
        STAGE_GATE,
    )
    if response.content["violation"]:
        reasons = [r for r in response.content["reasons"] if r] or ["judge flagged a violation"]
        return GateResult(passed=False, reasons=reasons)
    return GateResult(passed=True)
