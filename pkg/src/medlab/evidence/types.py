"""Evidence-base record types."""

from __future__ import annotations

import datetime
import re

from pydantic import BaseModel, Field, field_validator, model_validator

from .taxonomy import is_valid_modality, is_valid_task

_URL_RE = re.compile(r"^https?://[^\s]+$")


class TaskRepresentation(BaseModel):
    """Structured formalization of the research task."""

    modality: str
    task_category: str
    disease_context: str
    data_characteristics: list[str]
    evaluation_constraints: list[str]
    clinical_needs: list[str]

    @model_validator(mode="after")
    def _check(self) -> "TaskRepresentation":
        if not is_valid_modality(self.modality):
            raise ValueError(f"modality {self.modality!r} outside the closed taxonomy")
        if not is_valid_task(self.task_category):
            raise ValueError(f"task_category {self.task_category!r} outside the closed taxonomy")
        for name in ("data_characteristics", "evaluation_constraints", "clinical_needs"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be non-empty")
        if not self.disease_context:
            raise ValueError("disease_context must be non-empty")
        return self


class PaperRecord(BaseModel):
    record_id: str
    title: str
    year: int
    venue: str = ""
    citation_count: int = Field(ge=0)
    abstract: str = ""
    source_url: str = ""

    @field_validator("year")
    @classmethod
    def _year_range(cls, v: int) -> int:
        current = datetime.date.today().year
        if not 1950 <= v <= current:
            raise ValueError(f"year {v} outside [1950, {current}]")
        return v


class CodeRecord(BaseModel):
    repo_url: str
    popularity_proxy: int = Field(default=0, ge=0)
    license_id: str = ""
    entrypoints: list[str] = Field(default_factory=list)
    linked_paper: str | None = None

    @model_validator(mode="after")
    def _check(self) -> "CodeRecord":
        if not _URL_RE.match(self.repo_url):
            raise ValueError(f"repo_url {self.repo_url!r} is not a valid URL")
        for path in self.entrypoints:
            if path.startswith("/"):
                raise ValueError(f"entrypoint {path!r} must be a relative path")
        return self


class ParadigmCandidate(BaseModel):
    name: str
    novelty_note: str = ""
    performance_evidence: list[str] = Field(default_factory=list)
    maturity: str = "prototype"
    code_records: list[CodeRecord]
    alignment_rationale: str
    scores: dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check(self) -> "ParadigmCandidate":
        if self.maturity not in ("prototype", "maintained", "production"):
            raise ValueError(f"unknown maturity {self.maturity!r}")
        if not self.code_records:
            raise ValueError("a paradigm candidate needs at least one code record")
        if not self.alignment_rationale:
            raise ValueError("alignment_rationale must be non-empty")
        return self

    def composite(self) -> float:
        values = [self.scores.get(k, 1.0) for k in ("novelty", "performance", "maturity")]
        return sum(values) / len(values)


MATURITY_RANK = {"prototype": 0, "maintained": 1, "production": 2}


class MappedComponent(BaseModel):
    repo_url: str
    entrypoint: str


class MethodPrimitive(BaseModel):
    primitive_id: str
    abstract_directive: str
    formalism_sketch: str = ""
    mapped_components: list[MappedComponent] = Field(default_factory=list)
    source_paper: str
    ungrounded: bool = False

    @model_validator(mode="after")
    def _check(self) -> "MethodPrimitive":
        if not self.mapped_components and not self.ungrounded:
            raise ValueError("primitive without mapped components must be flagged ungrounded")
        return self


class EvidenceAnchor(BaseModel):
    record_id: str
    locator: str = ""


class EvidenceItem(BaseModel):
    claim_text: str
    anchor: EvidenceAnchor
    kind: str

    @field_validator("kind")
    @classmethod
    def _kind_known(cls, v: str) -> str:
        if v not in ("clinical", "technical"):
            raise ValueError("kind must be clinical or technical")
        return v


class EvidenceBase(BaseModel):
    task: TaskRepresentation
    papers: list[PaperRecord] = Field(default_factory=list)
    codes: list[CodeRecord] = Field(default_factory=list)
    primitives: list[MethodPrimitive] = Field(default_factory=list)
    items: list[EvidenceItem] = Field(default_factory=list)

    @model_validator(mode="after")
    def _anchors_resolve(self) -> "EvidenceBase":
        known = {p.record_id for p in self.papers} | {c.repo_url for c in self.codes}
        for item in self.items:
            if item.anchor.record_id not in known:
                raise ValueError(f"anchor {item.anchor.record_id!r} resolves to no stored record")
        paper_ids = {p.record_id for p in self.papers}
        for primitive in self.primitives:
            if primitive.source_paper not in paper_ids:
                raise ValueError(
                    f"primitive {primitive.primitive_id!r} references unknown paper "
                    f"{primitive.source_paper!r}"
                )
        return self

    def anchor_ids(self) -> set[str]:
        return {p.record_id for p in self.papers} | {c.repo_url for c in self.codes}
