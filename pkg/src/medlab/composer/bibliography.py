"""Minimal BibTeX database handling and deterministic .bbl emission.

The bibliography pass substitutes for bibtex inside the compile loop:
cited keys found in the aux file are looked up in the .bib database and
emitted as a thebibliography environment, sorted by key.
"""

from __future__ import annotations

import re
from pathlib import Path

from pydantic import BaseModel, Field

_ENTRY_RE = re.compile(r"@(\w+)\s*\{\s*([^,\s]+)\s*,", re.MULTILINE)
_CITATION_RE = re.compile(r"\\citation\{([^}]*)\}")


class BibEntry(BaseModel):
    key: str
    entry_type: str
    fields: dict[str, str] = Field(default_factory=dict)

    def formatted(self) -> str:
        author = self.fields.get("author", "Unknown author")
        title = self.fields.get("title", "Untitled")
        venue = self.fields.get("journal") or self.fields.get("booktitle") or ""
        year = self.fields.get("year", "n.d.")
        parts = [f"{author}.", f"\\newblock {title}."]
        if venue:
            parts.append(f"\\newblock {venue}, {year}.")
        else:
            parts.append(f"\\newblock {year}.")
        return "\n".join(parts)


def _extract_fields(body: str) -> dict[str, str]:
    fields: dict[str, str] = {}
    i = 0
    while i < len(body):
        match = re.match(r"\s*(\w+)\s*=\s*", body[i:])
        if not match:
            i += 1
            continue
        name = match.group(1).lower()
        i += match.end()
        if i >= len(body):
            break
        if body[i] == "{":
            depth = 1
            j = i + 1
            while j < len(body) and depth:
                if body[j] == "{":
                    depth += 1
                elif body[j] == "}":
                    depth -= 1
                j += 1
            value = body[i + 1 : j - 1]
            i = j
        elif body[i] == '"':
            j = body.index('"', i + 1) if '"' in body[i + 1 :] else len(body)
            value = body[i + 1 : j]
            i = j + 1
        else:
            match_val = re.match(r"[^,]*", body[i:])
            value = match_val.group(0).strip()
            i += match_val.end()
        fields[name] = re.sub(r"\s+", " ", value).strip()
    return fields


def parse_bib(text: str) -> dict[str, BibEntry]:
    """Parse a .bib database into entries keyed by citation key."""
    entries: dict[str, BibEntry] = {}
    for match in _ENTRY_RE.finditer(text):
        entry_type = match.group(1).lower()
        key = match.group(2)
        # body runs to the brace matching the entry's opening brace
        open_brace = text.index("{", match.start())
        depth = 1
        i = open_brace + 1
        while i < len(text) and depth:
            if text[i] == "{":
                depth += 1
            elif text[i] == "}":
                depth -= 1
            i += 1
        body = text[match.end() : i - 1]
        entries[key] = BibEntry(key=key, entry_type=entry_type, fields=_extract_fields(body))
    return entries


def cited_keys_from_aux(aux_text: str) -> list[str]:
    keys: list[str] = []
    for match in _CITATION_RE.finditer(aux_text):
        for key in match.group(1).split(","):
            key = key.strip()
            if key and key not in keys:
                keys.append(key)
    return keys


def emit_bbl(keys: list[str], database: dict[str, BibEntry]) -> str:
    """Deterministic thebibliography for the cited keys (sorted by key)."""
    lines = ["\\begin{thebibliography}{99}", ""]
    for key in sorted(keys):
        entry = database.get(key)
        if entry is None:
            continue
        lines.append(f"\\bibitem{{{key}}}")
        lines.append(entry.formatted())
        lines.append("")
    lines.append("\\end{thebibliography}")
    return "\n".join(lines) + "\n"


def write_bib_database(entries: list[BibEntry], path: str | Path) -> None:
    chunks = []
    for entry in sorted(entries, key=lambda e: e.key):
        fields = ",\n".join(f"  {name} = {{{value}}}" for name, value in sorted(entry.fields.items()))
        chunks.append(f"@{entry.entry_type}{{{entry.key},\n{fields}\n}}")
    Path(path).write_text("\n\n".join(chunks) + "\n", encoding="utf-8")
