"""Run state, checkpointing, and resume.

state.json records the mode, the stage cursor, and one artifact path +
digest per completed stage. Timestamps live in the meta.json sidecar so
determinism checks can compare workspaces cleanly.
"""

from __future__ import annotations

import datetime
import hashlib
import json
from pathlib import Path

from pydantic import BaseModel, Field

from .errors import CorruptCheckpoint

STATE_FILENAME = "state.json"
META_FILENAME = "meta.json"

STAGE_SEQUENCES = {
    "exploration": ["gate", "analyze", "explore", "evidence", "ideate", "execute", "compose", "finalize"],
    "reproduction": ["gate", "evidence", "ideate", "execute", "compose", "finalize"],
    "innovation": ["gate", "evidence", "ideate", "execute", "compose", "finalize"],
}


class Checkpoint(BaseModel):
    artifact: str  # workspace-relative path
    sha256: str


class RunState(BaseModel):
    run_id: str
    mode: str
    completed: list[str] = Field(default_factory=list)
    checkpoints: dict[str, Checkpoint] = Field(default_factory=dict)
    iteration_counters: dict[str, int] = Field(default_factory=dict)

    def sequence(self) -> list[str]:
        return STAGE_SEQUENCES[self.mode]

    def next_stage(self) -> str | None:
        for stage in self.sequence():
            if stage not in self.completed:
                return stage
        return None

    def is_complete(self) -> bool:
        return self.next_stage() is None


def _digest_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def save_state(state: RunState, workspace: Path) -> None:
    (workspace / STATE_FILENAME).write_text(
        json.dumps(state.model_dump(), indent=2, sort_keys=True), encoding="utf-8"
    )
    meta_path = workspace / META_FILENAME
    meta = {}
    if meta_path.exists():
        meta = json.loads(meta_path.read_text("utf-8"))
    meta.setdefault("created_at", datetime.datetime.now(datetime.timezone.utc).isoformat())
    meta["updated_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True), encoding="utf-8")


def checkpoint(state: RunState, workspace: Path, stage: str, artifact_rel: str) -> RunState:
    """Record a completed stage; the artifact digest guards later resumes."""
    artifact_path = workspace / artifact_rel
    state.checkpoints[stage] = Checkpoint(
        artifact=artifact_rel, sha256=_digest_file(artifact_path)
    )
    if stage in state.completed:
        # a global retry re-ran this stage; keep completion order stable
        pass
    else:
        state.completed.append(stage)
    save_state(state, workspace)
    return state


def resume(workspace: Path) -> RunState:
    """Load state for re-entry; digests of completed artifacts must hold."""
    state_path = workspace / STATE_FILENAME
    if not state_path.exists():
        raise FileNotFoundError(f"no state file under {workspace}")
    state = RunState.model_validate(json.loads(state_path.read_text("utf-8")))
    for stage, cp in state.checkpoints.items():
        path = workspace / cp.artifact
        if not path.exists() or _digest_file(path) != cp.sha256:
            raise CorruptCheckpoint(stage, str(path))
    return state
