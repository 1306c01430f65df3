"""Dataset ethics statements: origin, license, and approval per dataset."""

from __future__ import annotations

import json

from pydantic import BaseModel, Field

from .._data import read_data_text
from ..gateway import Gateway
from ..types import DatasetSpec

STAGE_COMPOSITION = "composition"

NOT_DOCUMENTED = "not documented"

_ETHICS_SCHEMA = {"narrative": "string"}


class EthicsEntry(BaseModel):
    dataset_id: str
    origin: str
    license_id: str
    approval: str


class EthicsStatement(BaseModel):
    entries: list[EthicsEntry]
    narrative: str = ""
    policy_source: str = ""


def load_policy_instructions() -> str:
    return json.loads(read_data_text("ethics_policy.json"))["policy_instructions"]


def review_ethics(
    dataset_specs: list[DatasetSpec],
    gateway: Gateway,
    policy_instructions: str | None = None,
) -> EthicsStatement:
    """One entry per dataset; missing fields are explicit, never omitted."""
    if not dataset_specs:
        raise ValueError("at least one dataset spec is required")
    policy = policy_instructions if policy_instructions is not None else load_policy_instructions()

    entries = [
        EthicsEntry(
            dataset_id=spec.dataset_id,
            origin=spec.origin or NOT_DOCUMENTED,
            license_id=spec.license_id or NOT_DOCUMENTED,
            approval=spec.ethical_approval or NOT_DOCUMENTED,
        )
        for spec in dataset_specs
    ]
    response = gateway.ask(
        "You write the data-governance statement of a medical manuscript following "
        "the given publication-policy instructions. State origin, license, and "
        "ethical approval for each dataset exactly as documented.",
        f"Policy instructions: {policy}\nDatasets:\n"
        + "\n".join(
            f"- {e.dataset_id}: origin={e.origin}; license={e.license_id}; "
            f"approval={e.approval}"
            for e in entries
        ),
        _ETHICS_SCHEMA,
        STAGE_COMPOSITION,
    )
    return EthicsStatement(
        entries=entries,
        narrative=response.content["narrative"],
        policy_source="ethics_policy.json" if policy_instructions is None else "caller",
    )


def render_statement(statement: EthicsStatement) -> str:
    lines = [statement.narrative, ""]
    for entry in statement.entries:
        lines.append(
            f"Dataset {entry.dataset_id}: origin {entry.origin}; "
            f"license {entry.license_id}; ethical approval {entry.approval}."
        )
    return "\n".join(lines).strip()
