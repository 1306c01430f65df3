"""Run configuration: backend selection, stage maxima, policies."""

from __future__ import annotations

from pathlib import Path

import yaml
from pydantic import BaseModel, Field, model_validator

from ..executor.judge import JudgePolicy


class ModeConfig(BaseModel):
    run_id: str | None = None
    backend: str = "replay"  # replay | live
    transcript_path: str | None = None
    provider_id: str = "local"
    model_id: str = "default"
    generator_temperature: float = 0.2
    seed: int | None = 0

    fanout: int = Field(default=3, ge=1)
    max_refine_iterations: int = Field(default=3, ge=0)
    max_repair_rounds: int = Field(default=3, ge=1)
    max_compile_iterations: int = Field(default=5, ge=1)
    global_retries: int = Field(default=1, ge=0)
    analyze_paper_limit: int = Field(default=10, ge=1)
    paradigm_count: int = Field(default=1, ge=1)

    judge_policy: JudgePolicy = Field(default_factory=JudgePolicy)

    sandbox: str = "local"  # local | scripted:<path> | container:<image>
    engine_dir: str | None = None  # texengine checkout for the wasm adapter
    compiler: str = "wasm"  # wasm | pdflatex | scripted:<path>
    search_index: str | None = None  # fixture search directory (exploration mode)
    ethics_policy_path: str | None = None
    budget_ceilings: dict[str, dict[str, int]] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check(self) -> "ModeConfig":
        if self.backend not in ("replay", "live"):
            raise ValueError("backend must be replay or live")
        if self.backend == "replay" and not self.transcript_path:
            raise ValueError("replay backend requires a transcript path")
        return self

    @classmethod
    def from_yaml(cls, path: str | Path) -> "ModeConfig":
        payload = yaml.safe_load(Path(path).read_text("utf-8")) or {}
        return cls.model_validate(payload)
