"""Internal cross-reference verification for TeX sources.

Reports dangling refs, duplicate labels, missing citations, and unused
labels with (line, column) locators. Verification never rewrites the
document; the only deterministic auto-fix offered is duplicate-label
renaming, since content-changing repairs need model judgment.
"""

from __future__ import annotations

import re

from pydantic import BaseModel, Field, model_validator

REF_COMMANDS = ("ref", "eqref", "pageref", "autoref")
CITE_COMMANDS = ("cite", "citep", "citet")

FINDING_KINDS = ("dangling_ref", "duplicate_label", "missing_citation", "unused_label")


class TokenizeError(Exception):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at {line}:{column}")
        self.line = line
        self.column = column


class Finding(BaseModel):
    kind: str
    line: int = Field(ge=1)
    column: int = Field(ge=1)
    symbol: str
    severity: str = "error"

    @model_validator(mode="after")
    def _check(self) -> "Finding":
        if self.kind not in FINDING_KINDS:
            raise ValueError(f"unknown finding kind {self.kind!r}")
        return self


class CrossrefReport(BaseModel):
    findings: list[Finding] = Field(default_factory=list)

    @model_validator(mode="after")
    def _sorted(self) -> "CrossrefReport":
        locators = [(f.line, f.column) for f in self.findings]
        if locators != sorted(locators):
            raise ValueError("findings must be sorted by locator")
        return self

    def is_clean(self) -> bool:
        return not self.findings


class _Occurrence(BaseModel):
    command: str
    key: str
    line: int
    column: int


def _strip_comment(line: str) -> str:
    out = []
    i = 0
    while i < len(line):
        ch = line[i]
        if ch == "%" and (i == 0 or line[i - 1] != "\\"):
            break
        out.append(ch)
        i += 1
    return "".join(out)


def _scan(source: str, commands: tuple[str, ...]) -> list[_Occurrence]:
    """Find \\cmd{arg} occurrences with 1-based locators; comments are ignored."""
    names = "|".join(commands)
    pattern = re.compile(rf"\\({names})\*?\s*\{{")
    occurrences: list[_Occurrence] = []
    for line_no, raw_line in enumerate(source.split("\n"), start=1):
        line = _strip_comment(raw_line)
        for match in pattern.finditer(line):
            start = match.end()  # after the opening brace
            depth = 1
            i = start
            while i < len(line):
                if line[i] == "{":
                    depth += 1
                elif line[i] == "}":
                    depth -= 1
                    if depth == 0:
                        break
                i += 1
            if depth != 0:
                raise TokenizeError(
                    f"unbalanced braces in \\{match.group(1)}", line_no, match.start() + 1
                )
            arg = line[start:i]
            occurrences.append(
                _Occurrence(
                    command=match.group(1),
                    key=arg.strip(),
                    line=line_no,
                    column=match.start() + 1,
                )
            )
    return occurrences


def scan_labels(source: str) -> list[_Occurrence]:
    return _scan(source, ("label",))


def scan_refs(source: str) -> list[_Occurrence]:
    return _scan(source, REF_COMMANDS)


def scan_cites(source: str) -> list[_Occurrence]:
    """Cite occurrences, one per key (multi-key \\cite{a,b} splits)."""
    occurrences = []
    for occ in _scan(source, CITE_COMMANDS):
        for key in (k.strip() for k in occ.key.split(",")):
            if key:
                occurrences.append(occ.model_copy(update={"key": key}))
    return occurrences


def scan_bibitems(source: str) -> set[str]:
    return {occ.key for occ in _scan(source, ("bibitem",))}


def resolve_crossrefs(tex_source: str, bibliography_keys: set[str] | None = None) -> CrossrefReport:
    """Report reference defects; a clean document yields an empty report.

    bibliography_keys holds the keys of the external bibliography
    database (e.g. parsed from refs.bib); \\bibitem keys inside the
    source count as well.
    """
    labels = scan_labels(tex_source)
    refs = scan_refs(tex_source)
    cites = scan_cites(tex_source)
    bib_keys = set(bibliography_keys or set()) | scan_bibitems(tex_source)

    defined: dict[str, int] = {}
    findings: list[Finding] = []
    for occ in labels:
        defined[occ.key] = defined.get(occ.key, 0) + 1
        if defined[occ.key] >= 2:
            findings.append(
                Finding(kind="duplicate_label", line=occ.line, column=occ.column, symbol=occ.key)
            )

    label_keys = {occ.key for occ in labels}
    referenced = {occ.key for occ in refs}
    for occ in refs:
        if occ.key not in label_keys:
            findings.append(
                Finding(kind="dangling_ref", line=occ.line, column=occ.column, symbol=occ.key)
            )
    for occ in cites:
        if occ.key not in bib_keys:
            findings.append(
                Finding(kind="missing_citation", line=occ.line, column=occ.column, symbol=occ.key)
            )
    seen_unused: set[str] = set()
    for occ in labels:
        if occ.key not in referenced and occ.key not in seen_unused:
            seen_unused.add(occ.key)
            findings.append(
                Finding(
                    kind="unused_label",
                    line=occ.line,
                    column=occ.column,
                    symbol=occ.key,
                    severity="warning",
                )
            )

    findings.sort(key=lambda f: (f.line, f.column, f.kind, f.symbol))
    return CrossrefReport(findings=findings)


def fix_duplicate_labels(tex_source: str) -> tuple[str, dict[str, list[str]]]:
    """Rename second and later definitions of each duplicated label.

    Refs keep their original key, which still resolves to the first
    definition; which duplicate a ref meant is inherently ambiguous, so
    refs are left alone.
    """
    counts: dict[str, int] = {}
    renames: dict[str, list[str]] = {}
    out_lines = []
    pattern = re.compile(r"\\label\s*\{([^{}]*)\}")
    for raw_line in tex_source.split("\n"):
        def _sub(match: re.Match) -> str:
            key = match.group(1).strip()
            counts[key] = counts.get(key, 0) + 1
            if counts[key] == 1:
                return match.group(0)
            new_key = f"{key}-dup{counts[key]}"
            renames.setdefault(key, []).append(new_key)
            return f"\\label{{{new_key}}}"

        out_lines.append(pattern.sub(_sub, raw_line))
    return "\n".join(out_lines), renames
