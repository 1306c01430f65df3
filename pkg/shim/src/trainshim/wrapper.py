"""Entrypoint wrapper: run the experiment command under instrumentation.

The wrapper exports the workspace to the child via TRAINSHIM_DIR so
in-process emit()/write_manifest() calls land in the right files, scrapes
the child's stdout against the optional pattern config, and propagates
the child's exit status. The metrics file exists afterwards even if the
child emitted nothing.
"""

from __future__ import annotations

import os
import subprocess
from pathlib import Path

from .emitter import METRICS_RELPATH, WORKSPACE_ENV, MetricEmitter
from .errors import SpawnFailure, WorkspaceUnwritable
from .scrape import ScrapeConfig, _StepCounter, scrape_line

STDOUT_CAPTURE = Path("logs") / "stdout.txt"
STDERR_CAPTURE = Path("logs") / "stderr.txt"


def wrap_entrypoint(
    command: list[str],
    workspace_dir: str | Path,
    scrape_config: ScrapeConfig | None = None,
) -> int:
    # absolute from the start: the child runs with cwd=workspace, so a relative
    # path exported via the environment would resolve against itself
    workspace = Path(workspace_dir).resolve()
    try:
        (workspace / "logs").mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise WorkspaceUnwritable(f"cannot create logs under {workspace}: {exc}")
    if not os.access(workspace, os.W_OK):
        raise WorkspaceUnwritable(f"workspace {workspace} is not writable")

    env = dict(os.environ)
    env[WORKSPACE_ENV] = str(workspace)

    stdout_path = workspace / STDOUT_CAPTURE
    stderr_path = workspace / STDERR_CAPTURE
    try:
        with open(stderr_path, "wb") as err:
            child = subprocess.Popen(
                command,
                cwd=workspace,
                env=env,
                stdout=subprocess.PIPE,
                stderr=err,
            )
            assert child.stdout is not None
            emitter = MetricEmitter(workspace) if scrape_config else None
            counter = _StepCounter()
            with open(stdout_path, "wb") as capture:
                for raw in child.stdout:
                    capture.write(raw)
                    capture.flush()
                    if scrape_config and emitter:
                        event = scrape_line(
                            raw.decode("utf-8", errors="replace").rstrip("\n"),
                            scrape_config,
                            counter,
                        )
                        if event is not None:
                            emitter.emit(**event)
            exit_status = child.wait()
            if emitter:
                emitter.close()
    except FileNotFoundError as exc:
        raise SpawnFailure(f"cannot start {command!r}: {exc}")

    metrics_path = workspace / METRICS_RELPATH
    if not metrics_path.exists():
        metrics_path.parent.mkdir(parents=True, exist_ok=True)
        metrics_path.touch()
    return exit_status
