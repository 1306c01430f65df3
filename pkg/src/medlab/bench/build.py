"""Bench construction from curated metadata into the on-disk layout."""

from __future__ import annotations

import json
from pathlib import Path

from pydantic import BaseModel

from ..evidence.taxonomy import load_taxonomy, tasks
from .cases import CaseAssets, build_cases
from .errors import CardinalityError
from .tiers import partition_tiers
from .types import BenchCase, PaperEntry


class SourceRecord(BaseModel):
    entry: PaperEntry
    assets: CaseAssets


class BenchBuild(BaseModel):
    task_count: int
    entry_count: int
    case_count: int
    out_dir: str


def load_source(source_path: str | Path) -> list[SourceRecord]:
    records = []
    for line in Path(source_path).read_text("utf-8").splitlines():
        if line.strip():
            records.append(SourceRecord.model_validate(json.loads(line)))
    return records


def build_bench(source_path: str | Path, out_dir: str | Path) -> BenchBuild:
    """Score, tier, and package every curated entry; write the bench tree."""
    records = load_source(source_path)
    by_task: dict[str, list[SourceRecord]] = {}
    for record in records:
        by_task.setdefault(record.entry.task_id, []).append(record)

    expected = set(tasks())
    missing = sorted(expected - set(by_task))
    if missing:
        raise CardinalityError(f"bench source lacks tasks: {missing}")
    extra = sorted(set(by_task) - expected)
    if extra:
        raise CardinalityError(f"bench source has unknown tasks: {extra}")
    for task_id, group in sorted(by_task.items()):
        if len(group) != 3:
            raise CardinalityError(f"task {task_id} has {len(group)} entries, needs exactly 3")

    out_dir = Path(out_dir)
    (out_dir / "cases").mkdir(parents=True, exist_ok=True)

    tiered_entries: list[PaperEntry] = []
    all_cases: list[BenchCase] = []
    assets_by_paper = {r.entry.paper_id: r.assets for r in records}
    for task_id in sorted(by_task):
        tiered = partition_tiers([r.entry for r in by_task[task_id]])
        tiered_entries.extend(tiered)
        for entry in tiered:
            all_cases.extend(build_cases(entry, assets_by_paper[entry.paper_id]))

    (out_dir / "tasks.json").write_text(
        json.dumps({"modalities": load_taxonomy()}, indent=2, sort_keys=True), encoding="utf-8"
    )
    entry_lines = [
        json.dumps(e.model_dump(), sort_keys=True)
        for e in sorted(tiered_entries, key=lambda e: e.paper_id)
    ]
    (out_dir / "entries.jsonl").write_text("\n".join(entry_lines) + "\n", encoding="utf-8")
    for case in all_cases:
        case_dir = out_dir / "cases" / case.case_id
        case_dir.mkdir(parents=True, exist_ok=True)
        (case_dir / "inputs.json").write_text(
            json.dumps(case.model_dump(), indent=2, sort_keys=True), encoding="utf-8"
        )

    return BenchBuild(
        task_count=len(by_task),
        entry_count=len(tiered_entries),
        case_count=len(all_cases),
        out_dir=str(out_dir),
    )


def load_bench_entries(bench_dir: str | Path) -> list[PaperEntry]:
    lines = (Path(bench_dir) / "entries.jsonl").read_text("utf-8").splitlines()
    return [PaperEntry.model_validate(json.loads(line)) for line in lines if line.strip()]


def load_bench_case(bench_dir: str | Path, case_id: str) -> BenchCase:
    path = Path(bench_dir) / "cases" / case_id / "inputs.json"
    return BenchCase.model_validate(json.loads(path.read_text("utf-8")))
