"""Clean TeX corpus generator with single-defect seeded mutations."""

from __future__ import annotations

BIB_KEYS = ("alpha2019", "beta2020", "gamma2021")


def make_clean_doc(index: int, sections: int = 3) -> str:
    """Deterministic clean document: labels all referenced, cites all known."""
    lines = ["\\begin{document}", "\\begin{minipage}{6.5in}"]
    for s in range(sections):
        key = f"sec:d{index}-s{s}"
        lines.append(f"\\section{{Part {s}}}\\label{{{key}}}")
        lines.append(f"Content of part {s} citing \\cite{{{BIB_KEYS[s % len(BIB_KEYS)]}}}.")
        lines.append(f"As Section~\\ref{{{key}}} shows, the result holds.")
    lines.append("\\end{minipage}")
    lines.append("\\end{document}")
    return "\n".join(lines) + "\n"


def mutate(doc: str, kind: str, index: int) -> tuple[str, str]:
    """Inject exactly one defect of the given kind; returns (doc, symbol)."""
    lines = doc.split("\n")
    insert_at = len(lines) - 3  # inside the minipage, before \end{minipage}
    if kind == "dangling_ref":
        symbol = f"ghost-{index}"
        lines.insert(insert_at, f"A broken pointer to~\\ref{{{symbol}}} here.")
    elif kind == "duplicate_label":
        symbol = f"sec:d{index}-s0"
        lines.insert(insert_at, f"Stray duplicate\\label{{{symbol}}} definition.")
    elif kind == "missing_citation":
        symbol = f"phantom{index}"
        lines.insert(insert_at, f"An uncited source~\\cite{{{symbol}}}.")
    elif kind == "unused_label":
        symbol = f"orphan-{index}"
        lines.insert(insert_at, f"Marked\\label{{{symbol}}} but never referenced.")
    else:
        raise ValueError(f"unknown mutation kind {kind!r}")
    return "\n".join(lines), symbol
