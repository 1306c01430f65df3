"""Compiler adapters: embedded WASM TeX engine, system pdflatex, scripted tests.

All adapters share the subprocess-style contract: compile(source path,
output dir) -> exit status + log path. Auxiliary files (aux, bbl)
persist in the output dir so the loop's rerun fixes behave like real
multi-pass LaTeX.
"""

from __future__ import annotations

import os
import shutil
import subprocess
from pathlib import Path

from .compilation import CompileResult

DRIVER_FILENAME = "driver.cjs"


def default_engine_dir() -> Path | None:
    """Locate the bundled texengine directory: cwd, then the repo checkout."""
    candidates = [
        Path.cwd() / "texengine",
        Path(__file__).resolve().parents[4] / "texengine",
    ]
    for candidate in candidates:
        if (candidate / DRIVER_FILENAME).exists():
            return candidate
    return None


class WasmTexAdapter:
    """Real TeX engine (e-TeX compiled to WebAssembly) driven through Node.

    The driver prepends one preamble line (aux re-enable plus a bullet
    that needs no extra font), hence line_offset=1 in results.
    """

    LINE_OFFSET = 1

    def __init__(
        self,
        engine_dir: str | Path | None = None,
        timeout_s: int = 120,
        source_date_epoch: int | None = 0,
    ):
        resolved = Path(engine_dir) if engine_dir is not None else default_engine_dir()
        self.engine_dir = resolved
        self.timeout_s = timeout_s
        # pinned by default so artifacts are byte-reproducible
        self.source_date_epoch = source_date_epoch

    def available(self) -> bool:
        if self.engine_dir is None or shutil.which("node") is None:
            return False
        driver = self.engine_dir / DRIVER_FILENAME
        modules = self.engine_dir / "node_modules" / "node-tikzjax"
        return driver.exists() and modules.exists()

    def compile(self, source_path: Path, out_dir: Path) -> CompileResult:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        log_path = out_dir / "compile_log.txt"
        env = dict(os.environ)
        if self.source_date_epoch is not None:
            env["SOURCE_DATE_EPOCH"] = str(self.source_date_epoch)
        try:
            completed = subprocess.run(
                ["node", str(self.engine_dir / DRIVER_FILENAME), str(source_path), str(out_dir)],
                capture_output=True,
                timeout=self.timeout_s,
                env=env,
            )
            exit_status = completed.returncode
            if exit_status >= 3 and not log_path.exists():
                log_path.write_bytes(completed.stderr)
        except subprocess.TimeoutExpired:
            exit_status = 3
            log_path.write_text("engine driver timed out\n", encoding="utf-8")
        artifact = out_dir / "main.dvi"
        return CompileResult(
            exit_status=exit_status,
            log_path=str(log_path),
            artifact_path=str(artifact) if artifact.exists() and exit_status == 0 else None,
            line_offset=self.LINE_OFFSET,
        )


class PdflatexAdapter:
    """System pdflatex in nonstop mode, for full TeX Live installations."""

    def __init__(self, binary: str = "pdflatex", timeout_s: int = 120):
        self.binary = binary
        self.timeout_s = timeout_s

    def available(self) -> bool:
        return shutil.which(self.binary) is not None

    def compile(self, source_path: Path, out_dir: Path) -> CompileResult:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        source_path = Path(source_path)
        try:
            completed = subprocess.run(
                [
                    self.binary,
                    "-interaction=nonstopmode",
                    f"-output-directory={out_dir}",
                    source_path.name,
                ],
                cwd=source_path.parent,
                capture_output=True,
                timeout=self.timeout_s,
            )
            exit_status = completed.returncode
        except subprocess.TimeoutExpired:
            exit_status = 3
        log_path = out_dir / f"{source_path.stem}.log"
        if not log_path.exists():
            log_path.write_text("", encoding="utf-8")
        artifact = out_dir / f"{source_path.stem}.pdf"
        return CompileResult(
            exit_status=exit_status,
            log_path=str(log_path),
            artifact_path=str(artifact) if artifact.exists() and exit_status == 0 else None,
            line_offset=0,
        )


class ScriptedCompilerAdapter:
    """Replays canned (exit_status, log_text, artifact) tuples per call."""

    def __init__(self, steps: list[dict]):
        self.steps = steps
        self.calls = 0

    def available(self) -> bool:
        return True

    def compile(self, source_path: Path, out_dir: Path) -> CompileResult:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        step = self.steps[min(self.calls, len(self.steps) - 1)]
        self.calls += 1
        log_path = out_dir / f"scripted_{self.calls}.log"
        log_path.write_text(step.get("log", ""), encoding="utf-8")
        artifact_path = None
        if step.get("artifact", False):
            artifact_path = out_dir / "main.svg"
            artifact_path.write_text("<svg/>", encoding="utf-8")
        return CompileResult(
            exit_status=int(step.get("exit_status", 0)),
            log_path=str(log_path),
            artifact_path=str(artifact_path) if artifact_path else None,
            line_offset=int(step.get("line_offset", 0)),
        )
