"""Benchmark types: paper entries, cases, score sheets, aggregates."""

from __future__ import annotations

from pydantic import BaseModel, Field, model_validator

from ..evidence.taxonomy import is_valid_modality, is_valid_task, modality_of_task
from ..rubrics import Rubric
from ..types import DatasetSpec

INPUT_MODES = ("reproduction", "innovation", "exploration")
TIERS = ("easy", "medium", "hard")


class RawMetrics(BaseModel):
    code_availability: float = Field(ge=0, le=1)
    venue_score: float = Field(ge=0, le=1)
    citation_count: int = Field(ge=0)
    year: int
    complexity: float = Field(ge=1, le=5)
    human_rating: float = Field(ge=1, le=5)


class PaperEntry(BaseModel):
    paper_id: str
    task_id: str
    modality: str
    raw_metrics: RawMetrics
    composite: float | None = None
    tier: str | None = None

    @model_validator(mode="after")
    def _check(self) -> "PaperEntry":
        if not is_valid_task(self.task_id):
            raise ValueError(f"task_id {self.task_id!r} outside the taxonomy")
        if not is_valid_modality(self.modality):
            raise ValueError(f"modality {self.modality!r} outside the taxonomy")
        if modality_of_task(self.task_id) != self.modality:
            raise ValueError(f"task {self.task_id!r} does not belong to modality {self.modality!r}")
        if (self.composite is None) != (self.tier is None):
            raise ValueError("tier is assigned iff composite is assigned")
        if self.composite is not None and not 0 <= self.composite <= 1:
            raise ValueError("composite must lie in [0,1]")
        if self.tier is not None and self.tier not in TIERS:
            raise ValueError(f"tier must be one of {TIERS}")
        return self


class PackagedInputs(BaseModel):
    instructions: str = ""
    dataset: DatasetSpec
    references: list[dict] = Field(default_factory=list)
    method_description: str = ""


class BenchCase(BaseModel):
    case_id: str
    paper_id: str
    input_mode: str
    packaged_inputs: PackagedInputs

    @model_validator(mode="after")
    def _check(self) -> "BenchCase":
        if self.input_mode not in INPUT_MODES:
            raise ValueError(f"input_mode must be one of {INPUT_MODES}")
        if self.input_mode == "reproduction" and not self.packaged_inputs.method_description:
            raise ValueError("reproduction cases include a method description")
        if self.input_mode == "exploration" and self.packaged_inputs.references:
            raise ValueError("exploration cases include no references")
        return self


class Rater(BaseModel):
    kind: str
    rater_id: str

    @model_validator(mode="after")
    def _check(self) -> "Rater":
        if self.kind not in ("llm", "human"):
            raise ValueError("rater kind must be llm or human")
        return self


class ScoreSheet(BaseModel):
    subject_id: str
    rubric_id: str
    rater: Rater
    scores: dict[str, float]

    def validate_against(self, rubric: Rubric) -> None:
        expected = set(rubric.dimension_names())
        actual = set(self.scores)
        if actual != expected:
            raise ValueError(
                f"score keys {sorted(actual)} do not match rubric dimensions {sorted(expected)}"
            )
        for name, value in self.scores.items():
            if not rubric.in_range(value):
                raise ValueError(f"score {name}={value} outside [{rubric.scale.min},{rubric.scale.max}]")


class DimensionStats(BaseModel):
    mean: float
    std: float
    n: int = Field(ge=0)


class SuccessRate(BaseModel):
    successes: int = Field(ge=0)
    total: int = Field(ge=1)
    rate: float

    @model_validator(mode="after")
    def _exact(self) -> "SuccessRate":
        if self.rate != self.successes / self.total:
            raise ValueError("rate must equal successes/total exactly")
        return self

    def display(self, digits: int = 2) -> str:
        return f"{round(self.rate, digits):.{digits}f}"


class AggregateReport(BaseModel):
    rubric_id: str
    per_dimension: dict[str, DimensionStats]
    success_rate: SuccessRate | None = None
