"""Narrative enhancement that provably cannot break references.

The document is edited paragraph-wise; any edit that changes the
multiset of label/ref/cite commands in its paragraph is rejected and
the original span kept, logged as a reference mutation.
"""

from __future__ import annotations

import re
from collections import Counter

from pydantic import BaseModel, Field

from ..gateway import Gateway

STAGE_COMPOSITION = "composition"

_COMMAND_RE = re.compile(r"\\(?:label|ref|eqref|pageref|autoref|cite[pt]?)\s*\{[^{}]*\}")

_ENHANCE_SCHEMA = {
    "edits": {"list": {"record": {"index": "integer", "text": "string"}}},
}


class ChangeLogEntry(BaseModel):
    paragraph_index: int
    status: str  # applied | rejected_reference_mutation
    before: str
    after: str


class EnhancementResult(BaseModel):
    text: str
    change_log: list[ChangeLogEntry] = Field(default_factory=list)


def reference_commands(text: str) -> Counter:
    return Counter(_COMMAND_RE.findall(text))


def enhance_narrative(document: str, gateway: Gateway) -> EnhancementResult:
    """Rewrite paragraphs for clarity while preserving every reference command."""
    if not document.strip():
        raise ValueError("document must be non-empty")
    paragraphs = document.split("\n\n")
    listing = "\n".join(
        f"[{i}] {p}" for i, p in enumerate(paragraphs) if p.strip()
    )
    response = gateway.ask(
        "You improve the clarity and scientific storyline of manuscript paragraphs. "
        "Return replacement text per paragraph index, keeping every \\label, \\ref, "
        "and \\cite command exactly as written.",
        f"Paragraphs:\n{listing}",
        _ENHANCE_SCHEMA,
        STAGE_COMPOSITION,
        temperature=gateway.generator_temperature,
    )

    change_log: list[ChangeLogEntry] = []
    for edit in response.content["edits"]:
        index = edit["index"]
        if not 0 <= index < len(paragraphs):
            continue
        before = paragraphs[index]
        after = edit["text"]
        if after == before:
            continue
        if reference_commands(before) != reference_commands(after):
            change_log.append(
                ChangeLogEntry(
                    paragraph_index=index,
                    status="rejected_reference_mutation",
                    before=before,
                    after=after,
                )
            )
            continue
        paragraphs[index] = after
        change_log.append(
            ChangeLogEntry(paragraph_index=index, status="applied", before=before, after=after)
        )
    return EnhancementResult(text="\n\n".join(paragraphs), change_log=change_log)
