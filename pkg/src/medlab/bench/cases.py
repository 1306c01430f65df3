"""Case construction: one case per input mode for every tiered paper."""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..types import DatasetSpec
from .errors import MissingAsset
from .types import BenchCase, PackagedInputs, PaperEntry


class CaseAssets(BaseModel):
    instructions: str
    method_summary: str
    references: list[dict] = Field(default_factory=list)
    dataset: DatasetSpec | None = None
    exploration_question: str = ""


def build_cases(entry: PaperEntry, assets: CaseAssets) -> list[BenchCase]:
    """Three cases per paper: reproduction, innovation, exploration."""
    if entry.tier is None:
        raise ValueError(f"entry {entry.paper_id} must be tiered before case construction")
    if assets.dataset is None:
        raise MissingAsset(f"entry {entry.paper_id}: dataset spec is required")
    if not assets.method_summary:
        raise MissingAsset(f"entry {entry.paper_id}: method summary is required")
    if not assets.references:
        raise MissingAsset(f"entry {entry.paper_id}: reference list is required")

    reproduction = BenchCase(
        case_id=f"{entry.paper_id}-reproduction",
        paper_id=entry.paper_id,
        input_mode="reproduction",
        packaged_inputs=PackagedInputs(
            instructions=assets.instructions,
            dataset=assets.dataset,
            references=assets.references,
            method_description=assets.method_summary,
        ),
    )
    innovation = BenchCase(
        case_id=f"{entry.paper_id}-innovation",
        paper_id=entry.paper_id,
        input_mode="innovation",
        packaged_inputs=PackagedInputs(
            instructions="",
            dataset=assets.dataset,
            references=assets.references,
        ),
    )
    exploration = BenchCase(
        case_id=f"{entry.paper_id}-exploration",
        paper_id=entry.paper_id,
        input_mode="exploration",
        packaged_inputs=PackagedInputs(
            instructions=assets.exploration_question or assets.instructions,
            dataset=assets.dataset,
            references=[],
        ),
    )
    return [reproduction, innovation, exploration]
