"""Provenance ledger: manuscript claims mapped to evidence and run records."""

from __future__ import annotations

import json
from pathlib import Path

from pydantic import BaseModel, Field

from .errors import ProvenanceGap


class LedgerEntry(BaseModel):
    locator: str
    target: str


class ProvenanceLedger(BaseModel):
    entries: list[LedgerEntry] = Field(default_factory=list)

    def validate_closure(self, valid_targets: set[str]) -> None:
        unresolved = sorted({e.target for e in self.entries} - valid_targets)
        if unresolved:
            raise ProvenanceGap(unresolved)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.model_dump(), indent=2, sort_keys=True), encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "ProvenanceLedger":
        return cls.model_validate(json.loads(Path(path).read_text("utf-8")))
