#!/usr/bin/env python3
"""Record the innovation-mode replay fixture.

Runs the full pipeline against a deterministic scripted provider while a
recording wrapper captures every exchange, then writes the transcript,
the task input, and the sandbox script under tests/fixtures/. Regenerate
with:
    python3 tools/make_innovation_transcript.py
"""

from __future__ import annotations

import json
import shutil
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from medlab.executor import MetricEvent, format_metric_line  # noqa: E402
from medlab.gateway import (  # noqa: E402
    Gateway,
    RawReply,
    RecordingBackend,
    TranscriptMeta,
    Usage,
    save_transcript,
)
from medlab.pipeline import ModeConfig, run_mode  # noqa: E402
from medlab.types import TaskInput  # noqa: E402

FIXTURES = ROOT / "tests" / "fixtures"

REFERENCE = {
    "record_id": "hale2022",
    "title": "Attention pooling improves photographic skin assessment",
    "year": 2022,
    "venue": "Fixture Journal",
    "citation_count": 120,
    "abstract": (
        "We classify dermoscopic images of melanoma using attention pooling over "
        "patch embeddings. Dermoscopic acquisition varies across clinics, and "
        "melanoma prevalence is low, so the attention maps are regularized. "
        "Our approach improves ranking of melanoma cases on dermoscopic benchmarks."
    ),
    "source_url": "https://example.org/hale2022",
}

CODE_REF = {
    "repo_url": "https://example.org/lesionnet",
    "popularity_proxy": 310,
    "license_id": "Apache-2.0",
    "entrypoints": ["train.py", "eval.py"],
    "linked_paper": "hale2022",
}

TASK = {
    "instructions": "",
    "dataset": {
        "dataset_id": "ds-skin-a",
        "name": "photographic skin archive",
        "description": "curated photographic skin images with biopsy-confirmed labels",
        "modality": "image",
        "task_hint": "image.classification",
        "origin": "public research archive",
        "license_id": "CC-BY-4.0",
        "ethical_approval": "institutional approval on record",
        "characteristics": ["photographic images", "biopsy-confirmed labels", "class imbalance"],
    },
    "references": [REFERENCE],
    "code_refs": [CODE_REF],
    "method_description": "",
    "declared_modality": "image",
    "declared_task": "image.classification",
}


def _metrics_lines() -> str:
    losses = [1.90, 1.52, 1.21, 0.97, 0.80, 0.66, 0.55, 0.47, 0.41, 0.36, 0.33, 0.30]
    lines = [
        format_metric_line(
            MetricEvent(step=i, split="train", loss=loss, grad_norm=1.0 + 0.1 * (i % 3),
                        ts="2024-01-01T00:00:00Z")
        )
        for i, loss in enumerate(losses)
    ]
    lines += [
        format_metric_line(
            MetricEvent(step=s, split="val", loss=v, ts="2024-01-01T00:00:00Z")
        )
        for s, v in [(3, 1.10), (7, 0.62), (11, 0.40)]
    ]
    return "\n".join(lines) + "\n"


SANDBOX_SCRIPT = {
    "train": {
        "files": {
            "logs/metrics.jsonl": _metrics_lines(),
            "logs/weights_manifest.json": json.dumps(
                {
                    "weights": [
                        {"path": "weights/model.bin", "bytes": 4096, "sha256": "c" * 64}
                    ],
                    "final_metrics": {"accuracy": 0.83, "auroc": 0.91},
                },
                sort_keys=True,
            ),
            "weights/model.bin": "w" * 4096,
        }
    }
}

DRAFT_BODIES = {
    "introduction": (
        "Photographic skin assessment must cope with scarce positives and camera "
        "variation. Grounded in prior evidence~\\cite{hale2022}, we study a "
        "class-balanced attention classifier; the design appears in "
        "Section~\\ref{sec:method}."
    ),
    "method": (
        "The model pools patch embeddings with regularized attention and trains "
        "with a prevalence-aware objective, following the grounded primitive "
        "from~\\cite{hale2022}. Training, validation, and testing run as a "
        "four-stage protocol."
    ),
    "experiments": (
        "The executed run shows a steadily decreasing training loss and a final "
        "test accuracy of 0.83 with an auroc of 0.91, as recorded in the run "
        "manifest. Loss curves are exported as deterministic vector figures."
    ),
    "conclusion": (
        "A prevalence-aware attention classifier is buildable directly from the "
        "grounded evidence~\\cite{hale2022} and passes the execution checks; "
        "broader multi-clinic validation remains future work."
    ),
}

DRAFT_CLAIMS = {
    "introduction": [{"span": "Grounded in prior evidence", "target": "hale2022"}],
    "method": [
        {"span": "regularized attention pooling", "target": "hale2022"},
        {"span": "four-stage protocol", "target": "https://example.org/lesionnet"},
    ],
    "experiments": [
        {
            "span": "final test accuracy of 0.83",
            "target": "run0:logs/weights_manifest.json:final_metrics.accuracy",
        },
        {"span": "decreasing training loss", "target": "run0:logs/metrics.jsonl"},
    ],
    "conclusion": [{"span": "grounded evidence", "target": "hale2022"}],
}

SUMMARIES = {
    "introduction": (
        "The task is low-prevalence skin classification from photographs. "
        "We motivate a class-balanced attention design."
    ),
    "method": (
        "The method pools patch embeddings with regularized attention. "
        "A prevalence-aware objective drives training."
    ),
    "experiments": (
        "Training loss decreased steadily across twelve logged steps. "
        "Final test accuracy reached 0.83 with auroc 0.91."
    ),
    "conclusion": (
        "The grounded design passed all execution checks. "
        "Multi-clinic validation is the next step."
    ),
}


class ScriptedProvider:
    """Deterministic provider: answers are derived from each request's schema."""

    def ask(self, request):
        content = self._answer(request)
        return RawReply(content, Usage(prompt_tokens=64, completion_tokens=48), 1)

    def _answer(self, request):
        schema = request.response_schema
        text = request.messages[-1].text

        if "violation" in schema:
            return {"violation": False, "reasons": []}

        if "items" in schema:
            return {
                "items": [
                    {
                        "claim_text": "Attention over patch embeddings improves ranking "
                        "of rare positive cases.",
                        "record_id": "hale2022",
                        "locator": "abstract",
                        "kind": "clinical",
                    },
                    {
                        "claim_text": "The reference implementation exposes train and "
                        "eval entrypoints suitable for transfer.",
                        "record_id": "https://example.org/lesionnet",
                        "locator": "train.py",
                        "kind": "technical",
                    },
                ]
            }

        if "primitives" in schema:
            return {
                "primitives": [
                    {
                        "primitive_id": "prim-attn-pool",
                        "abstract_directive": (
                            "Pool local patch features with a regularized weighting "
                            "map and train with a class-balanced objective."
                        ),
                        "formalism_sketch": "y = f(sum_i a_i h_i), sum_i a_i = 1, "
                        "with an entropy penalty on a.",
                        "components": [
                            {"repo_url": "https://example.org/lesionnet",
                             "entrypoint": "train.py"}
                        ],
                    }
                ]
            }

        if "clinical_insight" in schema:
            return {
                "clinical_insight": "Missed positives carry the highest clinical cost; "
                "prevalence is low and acquisition varies across clinics.",
                "concerns": ["class imbalance", "camera variation across clinics"],
            }

        if "evidence_links" in schema and "clinical_rationale" in schema:
            return {
                "clinical_rationale": "Low prevalence and acquisition variation demand "
                "a classifier that weights rare positive patterns explicitly.",
                "technical_design": "A patch-embedding classifier with regularized "
                "attention pooling and a prevalence-aware loss, initialized from the "
                "grounded reference implementation.",
                "objectives": [
                    "raise recall on the rare positive class",
                    "keep attention maps stable across acquisition settings",
                ],
                "evidence_links": [
                    {"record_id": "hale2022", "locator": "abstract"},
                    {"record_id": "https://example.org/lesionnet", "locator": "train.py"},
                ],
            }

        if "ethics_violation" in schema:
            return {
                "scores": {
                    "novelty": 4.0,
                    "maturity": 4.0,
                    "ethicality": 4.5,
                    "generalizability": 3.5,
                    "utility": 4.0,
                    "interpretability": 3.5,
                },
                "ethics_violation": False,
                "ethics_reasons": [],
                "commentary": "Conceptually consistent, empirically supported by the "
                "reference, and executable with the grounded codebase.",
            }

        if "algorithmic_rationale" in schema:
            return {
                "algorithmic_rationale": "Attention pooling concentrates capacity on "
                "diagnostic regions while the prevalence-aware loss counters imbalance.",
                "metrics": ["accuracy", "auroc"],
                "splits": "patient-level 70/10/20 split",
                "baselines": ["uniform-pooling classifier"],
                "success_criteria": [
                    "decreasing training loss across the run",
                    "test accuracy at or above 0.80",
                ],
            }

        if "stages" in schema:
            return {
                "stages": [
                    {"stage_name": "preprocess", "command": "python prepare.py",
                     "declared_inputs": ["/workspace/data"],
                     "declared_outputs": ["processed"], "timeout_s": 120},
                    {"stage_name": "train", "command": "python train.py",
                     "declared_inputs": ["processed"],
                     "declared_outputs": ["weights/model.bin"], "timeout_s": 600},
                    {"stage_name": "validate", "command": "python validate.py",
                     "declared_inputs": ["weights/model.bin"],
                     "declared_outputs": ["valreport.json"], "timeout_s": 120},
                    {"stage_name": "test", "command": "python test.py",
                     "declared_inputs": ["weights/model.bin"],
                     "declared_outputs": ["testreport.json"], "timeout_s": 120},
                ]
            }

        if "sections" in schema:
            return {
                "sections": [
                    {"section_id": "introduction", "title": "Introduction",
                     "goal": "motivate the task", "evidence_refs": ["hale2022"]},
                    {"section_id": "method", "title": "Method",
                     "goal": "describe the design", "evidence_refs": ["hale2022"]},
                    {"section_id": "experiments", "title": "Experiments",
                     "goal": "report the executed run", "evidence_refs": []},
                    {"section_id": "conclusion", "title": "Conclusion",
                     "goal": "summarize findings", "evidence_refs": []},
                ]
            }

        if "anchor_summary" in schema:
            for section_id in DRAFT_BODIES:
                if f"Section: {section_id}" in text:
                    return {
                        "body": DRAFT_BODIES[section_id],
                        "anchor_summary": SUMMARIES[section_id],
                        "claim_links": DRAFT_CLAIMS[section_id],
                    }
            raise AssertionError(f"unknown draft request: {text[:120]}")

        if "narrative" in schema:
            return {
                "narrative": "All data use follows the archive's license and the "
                "documented institutional approval; images are de-identified."
            }

        if "edits" in schema:
            return {"edits": []}

        raise AssertionError(f"unhandled schema: {sorted(schema)}")


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    (FIXTURES / "innovation_task.json").write_text(
        json.dumps(TASK, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    (FIXTURES / "innovation_sandbox.json").write_text(
        json.dumps(SANDBOX_SCRIPT, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    config = ModeConfig(
        backend="replay",
        transcript_path="unused-during-recording",
        sandbox=f"scripted:{FIXTURES / 'innovation_sandbox.json'}",
        compiler="wasm",
        engine_dir=str(ROOT / "texengine"),
        fanout=1,
        seed=0,
    )
    recorder = RecordingBackend(ScriptedProvider())
    gateway = Gateway(
        recorder,
        provider_id=config.provider_id,
        model_id=config.model_id,
        generator_temperature=config.generator_temperature,
    )

    workdir = ROOT / "build" / "transcript_recording"
    if workdir.exists():
        shutil.rmtree(workdir)
    task_input = TaskInput.model_validate(TASK)
    bundle = run_mode(task_input, "innovation", config, workdir, gateway=gateway)

    transcript = recorder.transcript()
    transcript.metadata = TranscriptMeta(
        created_at="2024-01-01T00:00:00Z",
        description="innovation-mode end-to-end fixture (scripted provider)",
    )
    save_transcript(transcript, FIXTURES / "innovation.transcript.jsonl")
    print(f"recorded {len(transcript)} transcript entries")
    print(
        f"bundle: verdict={bundle.verdict.status} compile={bundle.compile_status} "
        f"crossref_clean={bundle.crossref_clean} ledger={bundle.ledger_size}"
    )


if __name__ == "__main__":
    main()
