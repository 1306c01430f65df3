"""Task analysis, paradigm exploration, evidence-base assembly, reference surveying."""

from __future__ import annotations

import json
import logging
from pathlib import Path

from ..gateway import Gateway, Message
from . import taxonomy
from .errors import AbstractionLeak, DanglingAnchor, NoGroundedCandidate, UnmappableTask
from .stoplist import build_stoplist, find_leaks
from .types import (
    CodeRecord,
    EvidenceAnchor,
    EvidenceBase,
    EvidenceItem,
    MappedComponent,
    MethodPrimitive,
    ParadigmCandidate,
    PaperRecord,
    TaskRepresentation,
    MATURITY_RANK,
)

logger = logging.getLogger(__name__)

STAGE_EVIDENCE = "evidence"

_ANALYZE_SCHEMA = {
    "modality": "string",
    "task_category": "string",
    "disease_context": "string",
    "data_characteristics": {"list": "string"},
    "evaluation_constraints": {"list": "string"},
    "clinical_needs": {"list": "string"},
}

_EXPLORE_SCHEMA = {
    "candidates": {
        "list": {
            "record": {
                "name": "string",
                "novelty_note": "string",
                "maturity": "string",
                "alignment_rationale": "string",
                "scores": {
                    "record": {"novelty": "number", "performance": "number", "maturity": "number"}
                },
                "code_repos": {"list": {"record": {"repo_url": "string", "entrypoint": "string"}}},
                "performance_evidence": {"list": "string"},
            }
        }
    }
}

_PREPARE_SCHEMA = {
    "items": {
        "list": {
            "record": {
                "claim_text": "string",
                "record_id": "string",
                "locator": "string",
                "kind": "string",
            }
        }
    }
}

_SURVEY_SCHEMA = {
    "primitives": {
        "list": {
            "record": {
                "primitive_id": "string",
                "abstract_directive": "string",
                "formalism_sketch": "string",
                "components": {"list": {"record": {"repo_url": "string", "entrypoint": "string"}}},
            }
        }
    }
}


def _taxonomy_text() -> str:
    lines = []
    for modality, group in taxonomy.load_taxonomy().items():
        lines.append(f"{modality}: {', '.join(group)}")
    return "\n".join(lines)


def analyze_task(task_input, gateway: Gateway) -> TaskRepresentation:
    """Formalize the task into the closed modality/task taxonomy."""
    if not task_input.instructions.strip():
        raise ValueError("task instructions must be non-empty")

    dataset_note = ""
    if task_input.dataset is not None:
        dataset_note = (
            f"\nDataset: {task_input.dataset.name} — {task_input.dataset.description}"
        )
    system = (
        "You formalize medical AI research tasks. Choose modality and task_category "
        "strictly from this taxonomy:\n" + _taxonomy_text()
    )
    user = (
        "Identify the core clinical and technical challenges of this task and emit the "
        "structured representation.\nTask: " + task_input.instructions + dataset_note
    )

    response = gateway.ask(system, user, _ANALYZE_SCHEMA, STAGE_EVIDENCE)
    content = response.content
    if not taxonomy.is_valid_modality(content["modality"]) or not taxonomy.is_valid_task(
        content["task_category"]
    ):
        retry = gateway.ask(
            system,
            user
            + "\nYour previous labels "
            + f"({content['modality']!r}, {content['task_category']!r}) are outside the "
            "taxonomy. Pick valid entries.",
            _ANALYZE_SCHEMA,
            STAGE_EVIDENCE,
        )
        content = retry.content
        if not taxonomy.is_valid_modality(content["modality"]) or not taxonomy.is_valid_task(
            content["task_category"]
        ):
            raise UnmappableTask(
                f"model labeled task as ({content['modality']!r}, {content['task_category']!r})"
            )
    return TaskRepresentation.model_validate(content)


def explore_paradigms(
    task: TaskRepresentation, papers: list[PaperRecord], gateway: Gateway
) -> list[ParadigmCandidate]:
    """Rank candidate paradigms by novelty/performance/maturity judge scores."""
    if not papers:
        raise ValueError("papers must be non-empty")

    paper_lines = "\n".join(
        f"- [{p.record_id}] {p.title} ({p.year}, {p.venue}, {p.citation_count} citations)"
        for p in papers
    )
    system = (
        "You select emerging computational paradigms for a medical task. Score novelty, "
        "performance, and maturity on a 1-5 scale. Every candidate must name at least "
        "one open-source repository; maturity is one of prototype/maintained/production."
    )
    user = (
        f"Task: {task.task_category} ({task.modality}); context: {task.disease_context}.\n"
        f"Candidate literature:\n{paper_lines}\n"
        "Propose paradigm candidates aligned with the task's constraints."
    )
    response = gateway.ask(system, user, _EXPLORE_SCHEMA, STAGE_EVIDENCE)
    raw = response.content["candidates"]
    if any(_bad_scores(c) for c in raw):
        response = gateway.ask(
            system,
            user + "\nAll three scores must lie within [1, 5].",
            _EXPLORE_SCHEMA,
            STAGE_EVIDENCE,
        )
        raw = response.content["candidates"]
        if any(_bad_scores(c) for c in raw):
            raise ValueError("judge scores outside [1,5] after repair")

    candidates: list[ParadigmCandidate] = []
    for c in raw:
        if not c["code_repos"]:
            logger.info("dropping codeless paradigm candidate %r", c["name"])
            continue
        candidates.append(
            ParadigmCandidate(
                name=c["name"],
                novelty_note=c["novelty_note"],
                performance_evidence=c.get("performance_evidence", []),
                maturity=c["maturity"],
                code_records=[
                    CodeRecord(repo_url=r["repo_url"], entrypoints=[r["entrypoint"]])
                    for r in c["code_repos"]
                ],
                alignment_rationale=c["alignment_rationale"],
                scores={k: float(v) for k, v in c["scores"].items()},
            )
        )
    if not candidates:
        raise NoGroundedCandidate("every paradigm candidate lacked code records")
    candidates.sort(
        key=lambda c: (-c.composite(), -MATURITY_RANK.get(c.maturity, 0), c.name)
    )
    return candidates


def _bad_scores(candidate: dict) -> bool:
    return any(not 1.0 <= float(v) <= 5.0 for v in candidate["scores"].values())


def build_evidence_base(
    task: TaskRepresentation,
    papers: list[PaperRecord],
    codes: list[CodeRecord],
    gateway: Gateway,
    out_dir: str | Path | None = None,
) -> EvidenceBase:
    """Normalize references into anchored clinical/technical evidence items."""
    if not papers:
        raise ValueError("papers must be non-empty")

    deduped: list[PaperRecord] = []
    seen: set[str] = set()
    for paper in papers:
        if paper.record_id in seen:
            continue
        seen.add(paper.record_id)
        deduped.append(paper)

    known = {p.record_id for p in deduped} | {c.repo_url for c in codes}
    paper_block = "\n".join(
        f"[{p.record_id}] {p.title}: {p.abstract[:400]}" for p in deduped
    )
    code_block = "\n".join(f"[{c.repo_url}] entrypoints: {', '.join(c.entrypoints)}" for c in codes)
    system = (
        "You normalize references into an evidence base. Each item is a claim anchored "
        "to one record id; kind is clinical or technical. Use only the given record ids."
    )
    user = (
        f"Task: {task.task_category}; context: {task.disease_context}.\n"
        f"Papers:\n{paper_block}\nCode:\n{code_block or '(none)'}\n"
        "Extract grounded claims covering problem formulations, model designs, and "
        "experimental protocols."
    )
    response = gateway.ask(system, user, _PREPARE_SCHEMA, STAGE_EVIDENCE)
    items = response.content["items"]
    unknown = sorted({i["record_id"] for i in items} - known)
    if unknown:
        response = gateway.ask(
            system,
            user + f"\nThese anchors are unknown: {', '.join(unknown)}. Use only given ids.",
            _PREPARE_SCHEMA,
            STAGE_EVIDENCE,
        )
        items = response.content["items"]
        unknown = sorted({i["record_id"] for i in items} - known)
        if unknown:
            raise DanglingAnchor(f"anchors to unknown records after repair: {unknown}")

    base = EvidenceBase(
        task=task,
        papers=deduped,
        codes=codes,
        items=[
            EvidenceItem(
                claim_text=i["claim_text"],
                anchor=EvidenceAnchor(record_id=i["record_id"], locator=i["locator"]),
                kind=i["kind"],
            )
            for i in items
        ],
    )
    if out_dir is not None:
        persist_evidence_base(base, out_dir)
    return base


def persist_evidence_base(base: EvidenceBase, out_dir: str | Path) -> Path:
    path = Path(out_dir) / "evidence" / "base.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(base.model_dump(), indent=2, sort_keys=True), encoding="utf-8")
    return path


def load_evidence_base(out_dir: str | Path) -> EvidenceBase:
    path = Path(out_dir) / "evidence" / "base.json"
    return EvidenceBase.model_validate(json.loads(path.read_text("utf-8")))


def survey_reference(
    paper: PaperRecord, code: CodeRecord | None, gateway: Gateway
) -> list[MethodPrimitive]:
    """Decompose a reference into domain-terminology-free method primitives."""
    if not paper.abstract.strip():
        raise ValueError("paper abstract must be non-empty")

    stoplist = build_stoplist(paper.abstract)
    code_note = (
        f"Code repository: {code.repo_url} (entrypoints: {', '.join(code.entrypoints)})"
        if code
        else "No code repository is available."
    )
    system = (
        "You decompose a reference into core method primitives. Each abstract_directive "
        "must be free of the paper's disease- and anatomy-specific terms; express the "
        "method in domain-neutral language with a mathematical formalism sketch."
    )
    user = (
        f"Reference [{paper.record_id}] {paper.title}\nAbstract: {paper.abstract}\n"
        f"{code_note}\nForbidden domain terms: {', '.join(sorted(stoplist)) or '(none)'}"
    )
    response = gateway.ask(system, user, _SURVEY_SCHEMA, STAGE_EVIDENCE)
    primitives = response.content["primitives"]
    leaked = {
        p["primitive_id"]: find_leaks(p["abstract_directive"], stoplist) for p in primitives
    }
    if any(leaked.values()):
        terms = sorted({t for leaks in leaked.values() for t in leaks})
        response = gateway.ask(
            system,
            user + f"\nYour previous directives leaked these terms: {', '.join(terms)}. "
            "Restate them without those words.",
            _SURVEY_SCHEMA,
            STAGE_EVIDENCE,
        )
        primitives = response.content["primitives"]
        for p in primitives:
            leaks = find_leaks(p["abstract_directive"], stoplist)
            if leaks:
                raise AbstractionLeak(
                    f"directive {p['primitive_id']!r} still carries {leaks}", terms=leaks
                )

    results: list[MethodPrimitive] = []
    for p in primitives:
        components = [
            MappedComponent(repo_url=c["repo_url"], entrypoint=c["entrypoint"])
            for c in p["components"]
        ]
        if code is None:
            # nothing to ground against: strip claimed mappings and flag
            components = []
        elif not components and code.entrypoints:
            # grounded default when the model omitted a mapping for a provided repo
            components = [MappedComponent(repo_url=code.repo_url, entrypoint=code.entrypoints[0])]
        results.append(
            MethodPrimitive(
                primitive_id=p["primitive_id"],
                abstract_directive=p["abstract_directive"],
                formalism_sketch=p["formalism_sketch"],
                mapped_components=components,
                source_paper=paper.record_id,
                ungrounded=not components,
            )
        )
    return results
