"""Difficulty-tier partitioning: one paper per tier per task."""

from __future__ import annotations

from .errors import CardinalityError
from .scoring import ScoreContext, score_paper
from .types import PaperEntry

RANK_TO_TIER = ("hard", "medium", "easy")  # highest difficulty composite first


def partition_tiers(entries: list[PaperEntry], reference_year: int | None = None) -> list[PaperEntry]:
    """Assign hard/medium/easy across exactly three same-task entries.

    Ranking uses the difficulty composite; ties break by citation count
    descending, then paper_id. Returns new entries, one per tier,
    ordered hard -> easy.
    """
    if len(entries) != 3:
        raise CardinalityError(f"tier partitioning needs exactly 3 entries, got {len(entries)}")
    tasks = {e.task_id for e in entries}
    if len(tasks) != 1:
        raise CardinalityError(f"entries span multiple tasks: {sorted(tasks)}")

    context = ScoreContext(
        max_citation_count=max(e.raw_metrics.citation_count for e in entries),
        **({"reference_year": reference_year} if reference_year is not None else {}),
    )
    scored = [(score_paper(e, context, variant="difficulty"), e) for e in entries]
    scored.sort(key=lambda pair: (-pair[0], -pair[1].raw_metrics.citation_count, pair[1].paper_id))
    return [
        entry.model_copy(update={"composite": composite, "tier": tier})
        for (composite, entry), tier in zip(scored, RANK_TO_TIER)
    ]
