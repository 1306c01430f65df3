"""Self-healing compile loop over a pluggable compiler adapter.

Each iteration compiles, parses the log against the standard TeX
grammar ("! " error lines, "l.<n>" locators, "LaTeX Warning:" lines),
classifies the first actionable issue, and applies its deterministic
fix when one exists; anything unclassified goes to a model patch with
+/-20 lines of error context. Auxiliary state (aux, bbl) persists in
the build directory so rerun-style fixes behave like real multi-pass
LaTeX.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Protocol

from pydantic import BaseModel, Field, model_validator

from ..gateway import Gateway
from .bibliography import cited_keys_from_aux, emit_bbl, parse_bib

STAGE_COMPOSITION = "composition"

ERROR_CLASSES = (
    "missing_end",
    "undefined_control_sequence",
    "unbalanced_math",
    "missing_file",
    "undefined_reference_rerun",
    "missing_citation_bibpass",
)

DEFAULT_MAX_ITER = 5

_PATCH_SCHEMA = {
    "start_line": "integer",
    "end_line": "integer",
    "replacement": "string",
}


class CompileResult(BaseModel):
    exit_status: int
    log_path: str
    artifact_path: str | None = None
    line_offset: int = 0


class CompilerAdapter(Protocol):
    def available(self) -> bool: ...

    def compile(self, source_path: Path, out_dir: Path) -> CompileResult: ...


class AppliedFix(BaseModel):
    error_class: str
    fix_kind: str

    @model_validator(mode="after")
    def _check(self) -> "AppliedFix":
        if self.fix_kind not in ("deterministic", "model_patch"):
            raise ValueError("fix_kind must be deterministic or model_patch")
        return self


class CompileOutcome(BaseModel):
    status: str
    iterations: int = Field(ge=1)
    fixes_applied: list[AppliedFix] = Field(default_factory=list)
    artifact_path: str | None = None
    attempt_transcript: list[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check(self) -> "CompileOutcome":
        if self.status not in ("success", "failure"):
            raise ValueError("status must be success or failure")
        return self


class MaxIterationsExceeded(Exception):
    def __init__(self, outcome: CompileOutcome):
        super().__init__(f"compile still failing after {outcome.iterations} iterations")
        self.outcome = outcome


class LogIssue(BaseModel):
    error_class: str | None
    message: str
    source_line: int | None = None
    detail: str = ""


_ERROR_LINE_RE = re.compile(r"^! ?(.*)$")
_LOCATOR_RE = re.compile(r"^l\.(\d+)")
_MISSING_FILE_RE = re.compile(r"File `([^']+)' not found")
_CITATION_WARNING_RE = re.compile(r"LaTeX Warning: Citation `([^']+)'.*undefined")
_REFERENCE_WARNING_RE = re.compile(r"LaTeX Warning: Reference `([^']+)'.*undefined")
_RERUN_WARNING_RE = re.compile(
    r"There were undefined references|Label\(s\) may have changed|Rerun to get"
)
_MISSING_END_RE = re.compile(r"no legal \\end found|\(job aborted")


def parse_log(log_text: str, line_offset: int = 0) -> list[LogIssue]:
    """Extract issues from a TeX log, mapping l.<n> locators to source lines."""
    lines = log_text.split("\n")
    issues: list[LogIssue] = []
    for i, line in enumerate(lines):
        match = _ERROR_LINE_RE.match(line)
        if not match or not line.startswith("!"):
            continue
        message = match.group(1).strip()
        source_line = None
        detail = ""
        for follow in lines[i + 1 : i + 8]:
            locator = _LOCATOR_RE.match(follow)
            if locator:
                source_line = max(1, int(locator.group(1)) - line_offset)
                detail = follow
                break
        issues.append(
            LogIssue(
                error_class=_classify_error(message, log_text, lines, i),
                message=message,
                source_line=source_line,
                detail=detail,
            )
        )
    return issues


def _classify_error(message: str, full_log: str, lines: list[str], index: int) -> str | None:
    if message.startswith("Undefined control sequence"):
        return "undefined_control_sequence"
    if message.startswith("Missing $ inserted"):
        return "unbalanced_math"
    if _MISSING_FILE_RE.search(message):
        return "missing_file"
    if message.startswith("Emergency stop"):
        window = "\n".join(lines[index : index + 4])
        if _MISSING_END_RE.search(full_log) or re.search(r"<\*>\s*\\end", window):
            return "missing_end"
        return None
    if message.startswith("File ended while scanning"):
        return "missing_end"
    return None


def rerun_warnings(log_text: str) -> list[str]:
    warnings = []
    for line in log_text.split("\n"):
        if _CITATION_WARNING_RE.search(line) or _REFERENCE_WARNING_RE.search(line):
            warnings.append(line.strip())
        elif line.startswith("LaTeX Warning:") and _RERUN_WARNING_RE.search(line):
            warnings.append(line.strip())
    return warnings


def classify_log(log_text: str, line_offset: int, bbl_exists: bool) -> LogIssue | None:
    """The first actionable issue, or None when the log is clean."""
    issues = parse_log(log_text, line_offset)
    if issues:
        return issues[0]
    if _CITATION_WARNING_RE.search(log_text) and not bbl_exists:
        return LogIssue(error_class="missing_citation_bibpass", message="undefined citations")
    if rerun_warnings(log_text):
        return LogIssue(error_class="undefined_reference_rerun", message="rerun needed")
    return None


_DOLLAR_RE = re.compile(r"(?<!\\)\$")


def _fix_unbalanced_math(source: str, line_number: int | None) -> str:
    """Close the dangling $ on the line that opened it.

    TeX reports the missing $ where the paragraph or document ends, not
    where the math began, so walk back to the last line with an odd
    number of unescaped dollar signs.
    """
    lines = source.split("\n")
    limit = min(line_number or len(lines), len(lines))
    for index in range(limit - 1, -1, -1):
        if len(_DOLLAR_RE.findall(lines[index])) % 2 == 1:
            lines[index] = lines[index] + "$"
            return "\n".join(lines)
    index = min(max((line_number or 1) - 1, 0), len(lines) - 1)
    lines[index] = "$" + lines[index]
    return "\n".join(lines)


def _error_context(source: str, line_number: int | None, radius: int = 20) -> str:
    lines = source.split("\n")
    center = (line_number or 1) - 1
    lo = max(0, center - radius)
    hi = min(len(lines), center + radius + 1)
    return "\n".join(f"{i + 1}: {lines[i]}" for i in range(lo, hi))


def _model_patch(source: str, issue: LogIssue, gateway: Gateway) -> str:
    response = gateway.ask(
        "You repair a LaTeX source that fails to compile. Reply with a line-range "
        "replacement for the smallest span that fixes the error.",
        f"Compiler error: {issue.message}\n"
        f"Context (line numbers shown):\n{_error_context(source, issue.source_line)}",
        _PATCH_SCHEMA,
        STAGE_COMPOSITION,
    )
    start = max(1, int(response.content["start_line"]))
    end = max(start, int(response.content["end_line"]))
    lines = source.split("\n")
    end = min(end, len(lines))
    replacement = response.content["replacement"].split("\n")
    return "\n".join(lines[: start - 1] + replacement + lines[end:])


def compile_document(
    tex_source: str,
    compiler_adapter: CompilerAdapter,
    gateway: Gateway | None,
    max_iter: int = DEFAULT_MAX_ITER,
    workdir: str | Path = ".",
    jobname: str = "main",
) -> CompileOutcome:
    """Compile with bounded self-healing; raises MaxIterationsExceeded past max_iter."""
    if not compiler_adapter.available():
        raise RuntimeError("compiler adapter unavailable")
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    build_dir = workdir / "build"
    build_dir.mkdir(exist_ok=True)
    source_path = workdir / f"{jobname}.tex"

    source = tex_source
    fixes: list[AppliedFix] = []
    transcript: list[str] = []

    for iteration in range(1, max_iter + 1):
        source_path.write_text(source, encoding="utf-8")
        result = compiler_adapter.compile(source_path, build_dir)
        log_text = Path(result.log_path).read_text("utf-8") if Path(result.log_path).exists() else ""
        transcript.append(f"--- iteration {iteration} (exit {result.exit_status}) ---\n{log_text}")

        bbl_exists = (workdir / f"{jobname}.bbl").exists()
        issue = classify_log(log_text, result.line_offset, bbl_exists)
        if result.exit_status == 0 and result.artifact_path and issue is None:
            return CompileOutcome(
                status="success",
                iterations=iteration,
                fixes_applied=fixes,
                artifact_path=result.artifact_path,
            )
        if iteration == max_iter:
            break

        if issue is None:
            # failed exit with an unparseable log: nothing deterministic to do
            issue = LogIssue(error_class=None, message="unclassified compile failure")

        error_class = issue.error_class
        if error_class == "missing_end":
            source = source.rstrip("\n") + "\n\\end{document}\n"
            fixes.append(AppliedFix(error_class=error_class, fix_kind="deterministic"))
        elif error_class == "unbalanced_math":
            source = _fix_unbalanced_math(source, issue.source_line)
            fixes.append(AppliedFix(error_class=error_class, fix_kind="deterministic"))
        elif error_class == "missing_file":
            match = _MISSING_FILE_RE.search(issue.message)
            name = match.group(1) if match else "missing.tex"
            placeholder = workdir / Path(name).name
            placeholder.write_text("% placeholder inserted by the compile loop\n", encoding="utf-8")
            fixes.append(AppliedFix(error_class=error_class, fix_kind="deterministic"))
        elif error_class == "missing_citation_bibpass":
            _run_bib_pass(workdir, build_dir, jobname)
            fixes.append(AppliedFix(error_class=error_class, fix_kind="deterministic"))
        elif error_class == "undefined_reference_rerun":
            fixes.append(AppliedFix(error_class=error_class, fix_kind="deterministic"))
        else:
            if gateway is None:
                break
            source = _model_patch(source, issue, gateway)
            fixes.append(
                AppliedFix(error_class=error_class or "unclassified", fix_kind="model_patch")
            )

    outcome = CompileOutcome(
        status="failure",
        iterations=min(max_iter, len(transcript)),
        fixes_applied=fixes,
        attempt_transcript=transcript,
    )
    raise MaxIterationsExceeded(outcome)


def _run_bib_pass(workdir: Path, build_dir: Path, jobname: str) -> None:
    """Stand-in for bibtex: cited keys from the aux, entries from refs.bib."""
    aux_path = build_dir / "input.aux"
    if not aux_path.exists():
        aux_path = build_dir / f"{jobname}.aux"
    keys = cited_keys_from_aux(aux_path.read_text("utf-8")) if aux_path.exists() else []
    bib_path = workdir / "refs.bib"
    database = parse_bib(bib_path.read_text("utf-8")) if bib_path.exists() else {}
    (workdir / f"{jobname}.bbl").write_text(emit_bbl(keys, database), encoding="utf-8")
