"""Hypothesis, assessment, and research-plan types."""

from __future__ import annotations

from pydantic import BaseModel, Field, model_validator

from ..evidence.types import EvidenceAnchor
from ..gateway.canonical import canonical_digest

ASSESSMENT_DIMENSIONS = (
    "novelty",
    "maturity",
    "ethicality",
    "generalizability",
    "utility",
    "interpretability",
)

VERDICT_ACCEPT = "accept"
VERDICT_REFINE = "refine"
VERDICT_REJECT = "reject"


class Hypothesis(BaseModel):
    clinical_rationale: str
    technical_design: str
    objectives: list[str]
    evidence_links: list[EvidenceAnchor]
    iteration: int = Field(default=0, ge=0)
    persona_passes: list[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check(self) -> "Hypothesis":
        if not self.evidence_links:
            raise ValueError("every hypothesis must be grounded in at least one evidence link")
        return self

    def content_digest(self) -> str:
        return canonical_digest(
            {
                "clinical_rationale": self.clinical_rationale,
                "technical_design": self.technical_design,
                "objectives": self.objectives,
            }
        )


class Assessment(BaseModel):
    scores: dict[str, float]
    ethics_violation: bool = False
    ethics_reasons: list[str] = Field(default_factory=list)
    verdict: str
    commentary: str = ""
    dimensions: tuple[str, ...] = ASSESSMENT_DIMENSIONS

    @model_validator(mode="after")
    def _check(self) -> "Assessment":
        missing = [d for d in self.dimensions if d not in self.scores]
        if missing:
            raise ValueError(f"assessment missing dimensions: {missing}")
        for name, value in self.scores.items():
            if not 1.0 <= value <= 5.0:
                raise ValueError(f"score {name}={value} outside [1,5]")
        if self.verdict not in (VERDICT_ACCEPT, VERDICT_REFINE, VERDICT_REJECT):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.ethics_violation and self.verdict != VERDICT_REJECT:
            raise ValueError("ethics violations always reject, regardless of scores")
        return self

    def mean_score(self) -> float:
        return sum(self.scores[d] for d in self.dimensions) / len(self.dimensions)

    def lowest_dimensions(self) -> list[tuple[str, float]]:
        floor = min(self.scores[d] for d in self.dimensions)
        return [(d, self.scores[d]) for d in self.dimensions if self.scores[d] == floor]


class EvaluationProtocol(BaseModel):
    metrics: list[str]
    splits: str
    baselines: list[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check(self) -> "EvaluationProtocol":
        if not self.metrics:
            raise ValueError("evaluation protocol needs at least one metric")
        return self


class ResearchPlan(BaseModel):
    hypothesis: Hypothesis
    algorithmic_rationale: str
    evaluation_protocol: EvaluationProtocol
    dataset_binding: str
    success_criteria: list[str]
    low_confidence: bool = False

    @model_validator(mode="after")
    def _check(self) -> "ResearchPlan":
        if not self.success_criteria:
            raise ValueError("success_criteria must be non-empty")
        return self
