"""Core types shared across pipeline stages."""

from __future__ import annotations

from pydantic import BaseModel, Field


class DatasetSpec(BaseModel):
    """What the run knows about its dataset: identity, access, and governance."""

    dataset_id: str
    name: str
    description: str = ""
    modality: str
    task_hint: str | None = None
    origin: str | None = None
    license_id: str | None = None
    ethical_approval: str | None = None
    characteristics: list[str] = Field(default_factory=list)


class TaskInput(BaseModel):
    """The user's research request, shaped per interaction mode.

    Reproduction supplies instructions plus a method description and
    references; innovation supplies references and data only; exploration
    supplies instructions and data only.
    """

    instructions: str = ""
    dataset: DatasetSpec | None = None
    references: list[dict] = Field(default_factory=list)
    code_refs: list[dict] = Field(default_factory=list)
    method_description: str = ""
    declared_modality: str | None = None
    declared_task: str | None = None
