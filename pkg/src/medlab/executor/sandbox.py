"""Sandbox adapters and protocol execution.

Three adapters share one contract: a host-visible workspace directory
standing in for sandbox:/workspace, per-stage execution with timeouts,
and captures under logs/. The container adapter shells out to an OCI
runtime with network default-deny; the local adapter runs plain
subprocesses for tests and trusted code; the scripted adapter replays
canned outcomes and pre-baked files for offline runs.
"""

from __future__ import annotations

import json
import shlex
import shutil
import subprocess
import time
from pathlib import Path
from typing import Protocol

from pydantic import BaseModel, Field

from .errors import SandboxUnavailable
from .metrics import MANIFEST_FILENAME, METRICS_FILENAME, load_weights_manifest, parse_metrics_stream
from .types import CaptureRef, ExecutionProtocol, RunRecord, Stage, StageOutcome


class StageResult(BaseModel):
    exit_status: int
    wall_time_s: float = Field(ge=0)
    timed_out: bool = False


class SandboxAdapter(Protocol):
    def workspace(self) -> Path: ...

    def available(self) -> bool: ...

    def run_stage(self, stage: Stage) -> StageResult: ...


def _capture_paths(workspace: Path, stage_name: str) -> tuple[Path, Path]:
    logs = workspace / "logs"
    logs.mkdir(parents=True, exist_ok=True)
    return logs / f"{stage_name}.stdout", logs / f"{stage_name}.stderr"


class LocalProcessSandbox:
    """Runs stage commands as local subprocesses inside the workspace.

    No network isolation is possible here; use the container adapter for
    untrusted code.
    """

    def __init__(self, workspace_dir: str | Path):
        self._workspace = Path(workspace_dir).resolve()
        self._workspace.mkdir(parents=True, exist_ok=True)

    def workspace(self) -> Path:
        return self._workspace

    def available(self) -> bool:
        return True

    def run_stage(self, stage: Stage) -> StageResult:
        stdout_path, stderr_path = _capture_paths(self._workspace, stage.stage_name)
        started = time.monotonic()
        timed_out = False
        with open(stdout_path, "wb") as out, open(stderr_path, "wb") as err:
            try:
                completed = subprocess.run(
                    stage.command,
                    shell=True,
                    cwd=self._workspace,
                    stdout=out,
                    stderr=err,
                    timeout=stage.timeout_s,
                )
                exit_status = completed.returncode
            except subprocess.TimeoutExpired:
                timed_out = True
                exit_status = 124
        wall = time.monotonic() - started
        if timed_out:
            wall = max(wall, float(stage.timeout_s))
        return StageResult(exit_status=exit_status, wall_time_s=wall, timed_out=timed_out)


class ContainerSandbox:
    """OCI-runtime adapter: default-deny network, read-only mounts, limits."""

    def __init__(
        self,
        image: str,
        workspace_dir: str | Path,
        runtime: str = "docker",
        network_allowlist: list[str] | None = None,
        extra_mounts: list[tuple[str, str, bool]] | None = None,
    ):
        self.image = image
        self.runtime = runtime
        self.network_allowlist = network_allowlist or []
        self.extra_mounts = extra_mounts or []
        self._workspace = Path(workspace_dir).resolve()
        self._workspace.mkdir(parents=True, exist_ok=True)

    def workspace(self) -> Path:
        return self._workspace

    def available(self) -> bool:
        return shutil.which(self.runtime) is not None

    def _run_args(self, stage: Stage) -> list[str]:
        args = [
            self.runtime,
            "run",
            "--rm",
            "--network",
            "none" if not self.network_allowlist else "bridge",
            "--cpus",
            str(stage.limits.cpu_count),
            "--memory",
            str(stage.limits.memory_bytes),
            "-v",
            f"{self._workspace}:/workspace",
            "-w",
            "/workspace",
        ]
        for host, inside, read_only in self.extra_mounts:
            suffix = ":ro" if read_only else ""
            args += ["-v", f"{host}:{inside}{suffix}"]
        args += [self.image, "sh", "-c", stage.command]
        return args

    def run_stage(self, stage: Stage) -> StageResult:
        if not self.available():
            raise SandboxUnavailable(f"container runtime {self.runtime!r} not found")
        stdout_path, stderr_path = _capture_paths(self._workspace, stage.stage_name)
        started = time.monotonic()
        timed_out = False
        with open(stdout_path, "wb") as out, open(stderr_path, "wb") as err:
            try:
                completed = subprocess.run(
                    self._run_args(stage), stdout=out, stderr=err, timeout=stage.timeout_s
                )
                exit_status = completed.returncode
            except subprocess.TimeoutExpired:
                timed_out = True
                exit_status = 124
        wall = time.monotonic() - started
        if timed_out:
            wall = max(wall, float(stage.timeout_s))
        return StageResult(exit_status=exit_status, wall_time_s=wall, timed_out=timed_out)


class ScriptedSandbox:
    """Replays a per-stage script: exit codes plus files written into the workspace.

    Script shape: {stage_name: {"exit_status": int, "wall_time_s": float,
    "timed_out": bool, "files": {relpath: text}}}. Stages absent from the
    script succeed instantly with no writes. A {"runs": [script, ...]}
    wrapper scripts successive executions (the last entry repeats), which
    lets tests stage fail-then-succeed repair sequences.
    """

    def __init__(self, workspace_dir: str | Path, script: dict):
        self._workspace = Path(workspace_dir).resolve()
        self._workspace.mkdir(parents=True, exist_ok=True)
        self._runs = script.get("runs") if "runs" in script else [script]
        self.runs_started = 0

    @property
    def script(self) -> dict:
        index = min(max(self.runs_started - 1, 0), len(self._runs) - 1)
        return self._runs[index]

    @classmethod
    def from_file(cls, workspace_dir: str | Path, script_path: str | Path) -> "ScriptedSandbox":
        return cls(workspace_dir, json.loads(Path(script_path).read_text("utf-8")))

    def workspace(self) -> Path:
        return self._workspace

    def available(self) -> bool:
        return True

    def run_stage(self, stage: Stage) -> StageResult:
        entry = self.script.get(stage.stage_name, {})
        for relpath, text in (entry.get("files") or {}).items():
            path = self._workspace / relpath
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
        # touch capture files so evidence pointers resolve
        stdout_path, stderr_path = _capture_paths(self._workspace, stage.stage_name)
        stdout_path.touch()
        stderr_path.touch()
        return StageResult(
            exit_status=int(entry.get("exit_status", 0)),
            wall_time_s=float(entry.get("wall_time_s", 0.01)),
            timed_out=bool(entry.get("timed_out", False)),
        )


def list_artifacts(workspace: Path) -> list[str]:
    return sorted(
        str(p.relative_to(workspace).as_posix())
        for p in workspace.rglob("*")
        if p.is_file()
    )


def execute_protocol(protocol: ExecutionProtocol, sandbox: SandboxAdapter) -> RunRecord:
    """Run stages in order, halting after the first failing stage."""
    if not sandbox.available():
        raise SandboxUnavailable("sandbox adapter reports unavailable")
    workspace = sandbox.workspace()
    if hasattr(sandbox, "runs_started"):
        sandbox.runs_started += 1

    outcomes: list[StageOutcome] = []
    captures: list[CaptureRef] = []
    for stage in protocol.stages:
        result = sandbox.run_stage(stage)
        outcomes.append(
            StageOutcome(
                stage_name=stage.stage_name,
                exit_status=result.exit_status,
                wall_time_s=result.wall_time_s,
                timed_out=result.timed_out,
            )
        )
        captures.append(
            CaptureRef(
                stage_name=stage.stage_name,
                stdout=f"logs/{stage.stage_name}.stdout",
                stderr=f"logs/{stage.stage_name}.stderr",
            )
        )
        if result.exit_status != 0:
            break

    events = parse_metrics_stream(workspace / METRICS_FILENAME)
    manifest = load_weights_manifest(workspace / MANIFEST_FILENAME)
    return RunRecord(
        protocol_id=protocol.protocol_id,
        stage_outcomes=outcomes,
        metric_events=events,
        captures=captures,
        artifacts=list_artifacts(workspace),
        weights_manifest=manifest,
        subsample_fraction=protocol.subsample_fraction,
    )


def shell_quote(parts: list[str]) -> str:
    return " ".join(shlex.quote(p) for p in parts)
