"""Outline planning from reference structure and experiment results."""

from __future__ import annotations

from pydantic import BaseModel, Field, model_validator

from ..evidence.types import PaperRecord
from ..executor.results import StructuredResults
from ..gateway import Gateway

STAGE_COMPOSITION = "composition"

REQUIRED_SECTIONS = ("introduction", "method", "experiments", "conclusion")
REFERENCE_PAPER_COUNT = 2

_OUTLINE_SCHEMA = {
    "sections": {
        "list": {
            "record": {
                "section_id": "string",
                "title": "string",
                "goal": "string",
                "evidence_refs": {"list": "string"},
            }
        }
    }
}


class SectionNode(BaseModel):
    section_id: str
    title: str
    goal: str = ""
    evidence_refs: list[str] = Field(default_factory=list)
    children: list["SectionNode"] = Field(default_factory=list)


class Outline(BaseModel):
    sections: list[SectionNode]

    @model_validator(mode="after")
    def _check(self) -> "Outline":
        ids: list[str] = []

        def walk(nodes: list[SectionNode], depth: int) -> None:
            if depth > 3:
                raise ValueError("outline depth exceeds 3")
            for node in nodes:
                ids.append(node.section_id)
                walk(node.children, depth + 1)

        walk(self.sections, 1)
        if len(ids) != len(set(ids)):
            raise ValueError("section ids must be unique")
        return self

    def flat(self) -> list[SectionNode]:
        out: list[SectionNode] = []

        def walk(nodes: list[SectionNode]) -> None:
            for node in nodes:
                out.append(node)
                walk(node.children)

        walk(self.sections)
        return out

    def section_ids(self) -> list[str]:
        return [node.section_id for node in self.flat()]


def table_binding(stage: str, metric: str) -> str:
    return f"table:{stage}/{metric}"


def plan_outline(
    reference_papers: list[PaperRecord],
    results: StructuredResults,
    gateway: Gateway,
) -> Outline:
    """Outline following the most relevant references' organizational pattern."""
    if not reference_papers:
        raise ValueError("at least one reference paper with section metadata is required")
    chosen = reference_papers[:REFERENCE_PAPER_COUNT]
    bindings = [table_binding(stage, metric) for stage, metric in sorted(results.table())]

    response = gateway.ask(
        "You plan the global structure of a research manuscript following the "
        "organization of the given reference papers. Sections must at minimum cover "
        "introduction, method, experiments, and conclusion, using those section_ids.",
        "Reference papers:\n"
        + "\n".join(f"- {p.title} ({p.venue} {p.year})" for p in chosen)
        + "\nAvailable result tables: "
        + (", ".join(bindings) or "(none)"),
        _OUTLINE_SCHEMA,
        STAGE_COMPOSITION,
    )
    sections = [
        SectionNode(
            section_id=s["section_id"],
            title=s["title"],
            goal=s["goal"],
            evidence_refs=list(s["evidence_refs"]),
        )
        for s in response.content["sections"]
    ]
    ids = {s.section_id for s in sections}
    missing = [sid for sid in REQUIRED_SECTIONS if sid not in ids]
    if missing:
        raise ValueError(f"outline lacks required sections: {missing}")

    # every results table is bound into the experiments section
    for node in sections:
        if node.section_id == "experiments":
            for binding in bindings:
                if binding not in node.evidence_refs:
                    node.evidence_refs.append(binding)
    return Outline(sections=sections)
