#!/usr/bin/env python3
"""Generate the shipped fixture bench source: 19 tasks x 3 curated entries.

Deterministic synthetic metadata; regenerate with:
    python3 tools/make_bench_fixture.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from medlab.evidence.taxonomy import load_taxonomy  # noqa: E402

OUT = Path(__file__).resolve().parents[1] / "src" / "medlab" / "data" / "bench_fixture"

DISEASE_BY_MODALITY = {
    "image": "retinal and pulmonary disease",
    "video": "endoscopic and surgical scenes",
    "ehr": "intensive-care cohorts",
    "signal": "cardiac rhythm disorders",
    "text": "clinical documentation",
    "multimodal": "combined imaging and records",
}

VARIANTS = [
    {"suffix": "a", "code": 1.0, "venue": 0.9, "citations": 850, "year": 2017,
     "complexity": 2.0, "rating": 4.5},
    {"suffix": "b", "code": 0.6, "venue": 0.7, "citations": 220, "year": 2021,
     "complexity": 3.5, "rating": 3.8},
    {"suffix": "c", "code": 0.1, "venue": 0.8, "citations": 40, "year": 2024,
     "complexity": 4.8, "rating": 4.1},
]


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    lines = []
    for modality, task_ids in sorted(load_taxonomy().items()):
        for task_id in task_ids:
            short = task_id.split(".")[-1].replace("_", " ")
            for variant in VARIANTS:
                paper_id = f"{task_id}.{variant['suffix']}"
                entry = {
                    "paper_id": paper_id,
                    "task_id": task_id,
                    "modality": modality,
                    "raw_metrics": {
                        "code_availability": variant["code"],
                        "venue_score": variant["venue"],
                        "citation_count": variant["citations"],
                        "year": variant["year"],
                        "complexity": variant["complexity"],
                        "human_rating": variant["rating"],
                    },
                }
                dataset = {
                    "dataset_id": f"ds-{paper_id}",
                    "name": f"{short} benchmark cohort {variant['suffix']}",
                    "description": f"curated {modality} data for {short}",
                    "modality": modality,
                    "task_hint": task_id,
                    "origin": "public research archive",
                    "license_id": "CC-BY-4.0",
                    "ethical_approval": "institutional approval on record",
                    "characteristics": [f"{modality} records", "held-out test split"],
                }
                assets = {
                    "instructions": (
                        f"Implement and evaluate the reference approach to {short} "
                        f"for {DISEASE_BY_MODALITY[modality]}."
                    ),
                    "method_summary": (
                        f"Reference method {variant['suffix']} for {short}: a staged "
                        "pipeline with supervised training and task-standard evaluation."
                    ),
                    "references": [
                        {
                            "record_id": paper_id,
                            "title": f"A {short} study ({variant['suffix']})",
                            "year": variant["year"],
                            "venue": "fixture venue",
                            "citation_count": variant["citations"],
                            "abstract": f"Fixture abstract for {short}.",
                            "source_url": f"https://example.org/{paper_id}",
                        }
                    ],
                    "dataset": dataset,
                    "exploration_question": (
                        f"How can {short} for {DISEASE_BY_MODALITY[modality]} be improved "
                        "under limited supervision?"
                    ),
                }
                lines.append(json.dumps({"entry": entry, "assets": assets}, sort_keys=True))
    (OUT / "bench_source.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(lines)} curated entries to {OUT / 'bench_source.jsonl'}")


if __name__ == "__main__":
    main()
