"""Scoring rubrics shared by the ideation assessor and the bench harness.

Rubrics live in versioned JSON files under medlab/data/rubrics; the
built-in scale is 1-5, with an explicitly flagged external variant for
ingesting 0-10 reviewer-service scores.
"""

from __future__ import annotations

import json
from pathlib import Path

from ._data import read_data_text

from pydantic import BaseModel, Field, model_validator


class RubricDimension(BaseModel):
    name: str
    description: str = ""


class RubricScale(BaseModel):
    min: float = 1
    max: float = 5


class Rubric(BaseModel):
    rubric_id: str
    dimensions: list[RubricDimension]
    scale: RubricScale = Field(default_factory=RubricScale)
    external: bool = False

    @model_validator(mode="after")
    def _check(self) -> "Rubric":
        names = [d.name for d in self.dimensions]
        if len(names) != len(set(names)):
            raise ValueError("rubric dimension names must be unique")
        if not self.external and (self.scale.min, self.scale.max) != (1, 5):
            raise ValueError("non-external rubrics use the fixed [1,5] scale")
        return self

    def dimension_names(self) -> list[str]:
        return [d.name for d in self.dimensions]

    def in_range(self, value: float) -> bool:
        return self.scale.min <= value <= self.scale.max


def load_rubric(rubric_id: str) -> Rubric:
    text = read_data_text("rubrics", f"{rubric_id}.json")
    return Rubric.model_validate(json.loads(text))


def load_rubric_file(path: str | Path) -> Rubric:
    return Rubric.model_validate(json.loads(Path(path).read_text("utf-8")))


IDEA_RUBRIC_ID = "idea_v1"
IMPLEMENTATION_RUBRIC_ID = "implementation_v1"
MANUSCRIPT_RUBRIC_ID = "manuscript_v1"
EXTERNAL_REVIEW_RUBRIC_ID = "external_review_v1"
