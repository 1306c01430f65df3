"""Score-sheet aggregation and success-rate computation."""

from __future__ import annotations

import math

from ..executor.types import Verdict
from .errors import MixedRubric
from .types import AggregateReport, DimensionStats, ScoreSheet, SuccessRate


def _mean(values: list[float]) -> float:
    return sum(values) / len(values)


def _std(values: list[float], sample: bool) -> float:
    n = len(values)
    if n == 0:
        return 0.0
    mean = _mean(values)
    denominator = n - 1 if sample and n >= 2 else n
    return math.sqrt(sum((v - mean) ** 2 for v in values) / denominator)


def aggregate(
    sheets: list[ScoreSheet],
    verdicts: list[Verdict] | None = None,
    sample_std: bool = False,
) -> AggregateReport:
    """Per-dimension mean/std over sheets plus the optional success rate."""
    if not sheets:
        raise ValueError("at least one score sheet is required")
    rubric_ids = {s.rubric_id for s in sheets}
    if len(rubric_ids) != 1:
        raise MixedRubric(f"sheets span rubrics {sorted(rubric_ids)}")

    dimensions = sorted({name for sheet in sheets for name in sheet.scores})
    per_dimension = {}
    for name in dimensions:
        values = [sheet.scores[name] for sheet in sheets if name in sheet.scores]
        per_dimension[name] = DimensionStats(
            mean=_mean(values), std=_std(values, sample_std), n=len(values)
        )

    success_rate = None
    if verdicts is not None:
        successes = sum(1 for v in verdicts if v.status == "success")
        success_rate = SuccessRate(
            successes=successes, total=len(verdicts), rate=successes / len(verdicts)
        )
    return AggregateReport(
        rubric_id=next(iter(rubric_ids)),
        per_dimension=per_dimension,
        success_rate=success_rate,
    )


def render_report(report: AggregateReport) -> str:
    """Plain-text table alongside the JSON report."""
    lines = [f"rubric: {report.rubric_id}", ""]
    width = max((len(d) for d in report.per_dimension), default=9)
    lines.append(f"{'dimension'.ljust(width)}  {'mean':>7}  {'std':>7}  {'n':>4}")
    for name, stats in report.per_dimension.items():
        lines.append(f"{name.ljust(width)}  {stats.mean:7.3f}  {stats.std:7.3f}  {stats.n:4d}")
    if report.success_rate is not None:
        sr = report.success_rate
        lines.append("")
        lines.append(f"success rate: {sr.successes}/{sr.total} = {sr.display()}")
    return "\n".join(lines)
