"""Anchored section drafting: prior summaries feed every later section."""

from __future__ import annotations

import re

from pydantic import BaseModel, Field, model_validator

from ..evidence.types import EvidenceBase
from ..executor.results import StructuredResults
from ..gateway import Gateway
from .outline import SectionNode, table_binding

STAGE_COMPOSITION = "composition"

_DRAFT_SCHEMA = {
    "body": "string",
    "anchor_summary": "string",
    "claim_links": {"list": {"record": {"span": "string", "target": "string"}}},
}


class UnresolvedClaim(Exception):
    def __init__(self, targets: list[str]):
        super().__init__(f"claim links target unknown anchors: {targets}")
        self.targets = targets


class ClaimLink(BaseModel):
    span: str
    target: str


class SectionDraft(BaseModel):
    section_id: str
    body: str
    anchor_summary: str
    claim_links: list[ClaimLink] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check(self) -> "SectionDraft":
        if not self.anchor_summary.strip():
            raise ValueError("anchor_summary must be non-empty")
        return self


_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+")


def clip_summary(text: str, max_sentences: int = 3) -> str:
    sentences = [s for s in _SENTENCE_SPLIT.split(text.strip()) if s]
    return " ".join(sentences[:max_sentences])


def valid_targets(evidence: EvidenceBase, results: StructuredResults) -> set[str]:
    targets = set(evidence.anchor_ids())
    for cell in results.cells:
        targets.add(cell.provenance)
        targets.add(table_binding(cell.stage, cell.metric))
    for series in results.series:
        targets.add(series.provenance)
    return targets


def draft_section(
    node: SectionNode,
    evidence: EvidenceBase,
    prior_anchors: list[str],
    results: StructuredResults,
    gateway: Gateway,
) -> SectionDraft:
    """Draft one section; all prior anchor summaries go into the request verbatim."""
    known = valid_targets(evidence, results)
    anchors_block = "\n".join(f"[anchor {i + 1}] {a}" for i, a in enumerate(prior_anchors))
    evidence_block = "\n".join(
        f"- ({item.anchor.record_id}) [{item.kind}] {item.claim_text}" for item in evidence.items
    )
    results_block = ", ".join(sorted({c.provenance for c in results.cells})) or "(none)"

    system = (
        "You draft one manuscript section in LaTeX body text. Every factual claim "
        "links a text span to an evidence anchor or run-record pointer. Cite papers "
        "with \\cite{record_id}. End with a summary of at most three sentences."
    )
    user = (
        f"Section: {node.section_id} — {node.title}\nGoal: {node.goal}\n"
        f"Allotted refs: {', '.join(node.evidence_refs) or '(none)'}\n"
        f"Prior section summaries:\n{anchors_block or '(first section)'}\n"
        f"Evidence:\n{evidence_block}\n"
        f"Result provenance pointers: {results_block}"
    )
    response = gateway.ask(system, user, _DRAFT_SCHEMA, STAGE_COMPOSITION,
                           temperature=gateway.generator_temperature)
    links = [ClaimLink(**l) for l in response.content["claim_links"]]
    unknown = sorted({l.target for l in links} - known)
    if unknown:
        response = gateway.ask(
            system,
            user + f"\nThese claim targets are unknown: {', '.join(unknown)}. Use only "
            "listed anchors and pointers.",
            _DRAFT_SCHEMA,
            STAGE_COMPOSITION,
            temperature=gateway.generator_temperature,
        )
        links = [ClaimLink(**l) for l in response.content["claim_links"]]
        unknown = sorted({l.target for l in links} - known)
        if unknown:
            raise UnresolvedClaim(unknown)

    return SectionDraft(
        section_id=node.section_id,
        body=response.content["body"],
        anchor_summary=clip_summary(response.content["anchor_summary"]),
        claim_links=links,
    )
