"""Five-dimension paper scoring with quality and difficulty composites.

Dimensions, each normalized to [0,1]: code availability and venue score
as given; citations as log(1+c)/log(1+c_max); publication recency
weighted by methodological complexity; the human rating rescaled from
[1,5]. The quality composite uses code availability as-is; the
difficulty composite inverts it, making higher mean harder, which is
the variant tier partitioning uses.
"""

from __future__ import annotations

import math

from pydantic import BaseModel, Field

from .errors import MissingMetric
from .types import PaperEntry, RawMetrics

RECENCY_BASE_YEAR = 2015
REFERENCE_YEAR = 2025  # fixed so composites do not drift with the wall clock


class ScoreContext(BaseModel):
    max_citation_count: int = Field(ge=0)
    reference_year: int = REFERENCE_YEAR


def _clamp01(value: float) -> float:
    return min(1.0, max(0.0, value))


def normalized_dimensions(metrics: RawMetrics, context: ScoreContext) -> dict[str, float]:
    if context.max_citation_count == 0:
        citations = 0.0
    else:
        citations = math.log1p(metrics.citation_count) / math.log1p(context.max_citation_count)
    recency = _clamp01(
        (metrics.year - RECENCY_BASE_YEAR) / (context.reference_year - RECENCY_BASE_YEAR)
    )
    complexity = (metrics.complexity - 1) / 4
    return {
        "code_availability": metrics.code_availability,
        "venue_score": metrics.venue_score,
        "citations": _clamp01(citations),
        "year_complexity": recency * complexity,
        "human_rating": (metrics.human_rating - 1) / 4,
    }


def composite_from(dimensions: dict[str, float]) -> float:
    return sum(dimensions.values()) / len(dimensions)


def score_paper(entry: PaperEntry, context: ScoreContext, variant: str = "quality") -> float:
    """Unweighted mean of the five normalized dimensions, in [0,1]."""
    if entry.raw_metrics is None:
        raise MissingMetric(f"entry {entry.paper_id} lacks raw metrics")
    dims = normalized_dimensions(entry.raw_metrics, context)
    if variant == "difficulty":
        dims["code_availability"] = 1.0 - dims["code_availability"]
    elif variant != "quality":
        raise ValueError(f"unknown composite variant {variant!r}")
    return composite_from(dims)
