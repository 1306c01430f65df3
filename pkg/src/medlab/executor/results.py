"""Consolidation of validated runs into structured, provenance-carrying results."""

from __future__ import annotations

from pydantic import BaseModel, Field

from .errors import NoValidatedRun
from .types import RunRecord, Verdict


class MetricCell(BaseModel):
    stage: str
    metric: str
    value: float
    run_index: int
    provenance: str


class LossSeries(BaseModel):
    split: str
    run_index: int
    points: list[tuple[int, float]]
    provenance: str


class StructuredResults(BaseModel):
    cells: list[MetricCell] = Field(default_factory=list)
    series: list[LossSeries] = Field(default_factory=list)
    run_count: int = 0

    def table(self) -> dict[tuple[str, str], list[MetricCell]]:
        grouped: dict[tuple[str, str], list[MetricCell]] = {}
        for cell in self.cells:
            grouped.setdefault((cell.stage, cell.metric), []).append(cell)
        return grouped


def consolidate_results(runs: list[tuple[RunRecord, Verdict]]) -> StructuredResults:
    """Fold success runs into metric tables and figure-ready loss series."""
    successes = [record for record, verdict in runs if verdict.status == "success"]
    if not successes:
        raise NoValidatedRun("no run with a success verdict to consolidate")

    cells: list[MetricCell] = []
    series: list[LossSeries] = []
    for run_index, record in enumerate(successes):
        if record.weights_manifest is not None:
            for metric, value in sorted(record.weights_manifest.final_metrics.items()):
                cells.append(
                    MetricCell(
                        stage="test",
                        metric=metric,
                        value=value,
                        run_index=run_index,
                        provenance=f"run{run_index}:logs/weights_manifest.json:final_metrics.{metric}",
                    )
                )
        for split in ("train", "val"):
            points = [
                (event.step, event.loss)
                for event in record.metric_events
                if event.split == split
            ]
            if points:
                series.append(
                    LossSeries(
                        split=split,
                        run_index=run_index,
                        points=points,
                        provenance=f"run{run_index}:logs/metrics.jsonl",
                    )
                )
    return StructuredResults(cells=cells, series=series, run_count=len(successes))
