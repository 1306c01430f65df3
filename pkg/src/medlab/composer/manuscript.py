"""Manuscript assembly: outline to compiled document in one workspace.

The manuscript workspace ends up as manuscript/{main.tex, refs.bib,
figures/*.svg, report.json, compile_log.txt} plus build/ artifacts from
the compile loop.
"""

from __future__ import annotations

import json
import re
import shutil
from pathlib import Path

from pydantic import BaseModel, Field

from ..evidence.types import EvidenceBase
from ..executor.results import StructuredResults
from ..gateway import Gateway
from ..ideation.types import ResearchPlan
from ..types import DatasetSpec
from .adapters import WasmTexAdapter
from .bibliography import BibEntry, write_bib_database
from .compilation import CompileOutcome, CompilerAdapter, compile_document
from .crossref import CrossrefReport, resolve_crossrefs
from .drafting import SectionDraft, draft_section
from .ethics import EthicsStatement, render_statement, review_ethics
from .figures import block_diagram, generate_figures
from .narrative import enhance_narrative
from .outline import Outline, plan_outline

DEFAULT_COMPONENT_LABELS = ["preprocess", "train", "validate", "test"]


class ClaimEntry(BaseModel):
    locator: str
    target: str


class ComposedManuscript(BaseModel):
    outline: Outline
    drafts: list[SectionDraft]
    figure_paths: list[str] = Field(default_factory=list)
    ethics: EthicsStatement
    crossref_report: CrossrefReport
    compile_outcome: CompileOutcome
    main_tex: str
    claim_entries: list[ClaimEntry] = Field(default_factory=list)


def papers_to_bib(base: EvidenceBase) -> list[BibEntry]:
    entries = []
    for paper in base.papers:
        fields = {"title": paper.title, "year": str(paper.year)}
        if paper.venue:
            fields["howpublished"] = paper.venue
        if paper.source_url:
            fields["note"] = paper.source_url
        entries.append(BibEntry(key=paper.record_id, entry_type="misc", fields=fields))
    return entries


def default_title(base: EvidenceBase) -> str:
    task = base.task.task_category.split(".")[-1].replace("_", " ")
    return f"An Evidence-Grounded Study of {task.title()} for {base.task.disease_context}"


def assemble_tex(
    title: str,
    outline: Outline,
    drafts: dict[str, SectionDraft],
    ethics_text: str,
    figure_files: list[str],
) -> str:
    # label only sections something actually references, so a clean draft
    # yields a clean crossref report
    body_text = "\n".join(d.body for d in drafts.values()) + "\n" + ethics_text
    referenced = set(re.findall(r"\\(?:auto|page)?ref\{(sec:[^{}]*)\}", body_text))

    def heading(section_id: str, title_text: str) -> str:
        label = f"sec:{section_id}"
        suffix = f"\\label{{{label}}}" if label in referenced else ""
        return f"\\section{{{title_text}}}{suffix}"

    lines = [
        "\\begin{document}",
        "\\begin{minipage}{6.5in}",
        f"{{\\Large\\bfseries {title}\\par}}",
        "\\bigskip",
    ]
    for node in outline.flat():
        draft = drafts.get(node.section_id)
        if draft is None:
            continue
        lines.append(heading(node.section_id, node.title))
        lines.append(draft.body)
        lines.append("")
    lines.append(heading("ethics", "Ethics and Data Governance"))
    lines.append(ethics_text)
    lines.append("")
    if figure_files:
        escaped = [name.replace("_", "\\_") for name in figure_files]
        lines.append(heading("artifacts", "Reproducibility Artifacts"))
        lines.append(
            "The following vector figures are generated deterministically from the "
            "run logs: " + ", ".join(f"\\texttt{{{name}}}" for name in escaped) + "."
        )
        lines.append("")
    lines.append("\\bibliographystyle{plain}")
    lines.append("\\bibliography{refs}")
    lines.append("\\end{minipage}")
    lines.append("\\end{document}")
    return "\n".join(lines) + "\n"


def compose_manuscript(
    base: EvidenceBase,
    plan: ResearchPlan,
    results: StructuredResults,
    datasets: list[DatasetSpec],
    gateway: Gateway,
    manuscript_dir: str | Path,
    adapter: CompilerAdapter | None = None,
    max_iter: int = 5,
    component_labels: list[str] | None = None,
    title: str | None = None,
) -> ComposedManuscript:
    manuscript_dir = Path(manuscript_dir)
    manuscript_dir.mkdir(parents=True, exist_ok=True)
    adapter = adapter if adapter is not None else WasmTexAdapter()

    outline = plan_outline(base.papers, results, gateway)

    drafts: dict[str, SectionDraft] = {}
    anchors: list[str] = []
    for node in outline.flat():
        draft = draft_section(node, base, list(anchors), results, gateway)
        drafts[node.section_id] = draft
        anchors.append(draft.anchor_summary)

    figures_dir = manuscript_dir / "figures"
    figure_paths = generate_figures(results, figures_dir)
    diagram = block_diagram(
        component_labels or DEFAULT_COMPONENT_LABELS, figures_dir / "architecture.svg"
    )
    figure_paths = list(figure_paths) + [diagram]
    figure_names = [f"figures/{p.name}" for p in figure_paths]

    ethics = review_ethics(datasets, gateway)

    bib_entries = papers_to_bib(base)
    write_bib_database(bib_entries, manuscript_dir / "refs.bib")

    tex = assemble_tex(
        title or default_title(base),
        outline,
        drafts,
        render_statement(ethics),
        figure_names,
    )
    enhancement = enhance_narrative(tex, gateway)
    tex = enhancement.text

    report = resolve_crossrefs(tex, {e.key for e in bib_entries})
    (manuscript_dir / "report.json").write_text(
        json.dumps(report.model_dump(), indent=2, sort_keys=True), encoding="utf-8"
    )

    outcome = compile_document(
        tex, adapter, gateway, max_iter=max_iter, workdir=manuscript_dir, jobname="main"
    )
    if outcome.artifact_path:
        # store workspace-relative paths so run artifacts are location-independent
        outcome = outcome.model_copy(
            update={
                "artifact_path": str(Path(outcome.artifact_path).relative_to(manuscript_dir))
            }
        )
    build_log = manuscript_dir / "build" / "compile_log.txt"
    if build_log.exists():
        shutil.copyfile(build_log, manuscript_dir / "compile_log.txt")

    claim_entries = [
        ClaimEntry(locator=f"{draft.section_id}:{link.span}", target=link.target)
        for draft in drafts.values()
        for link in draft.claim_links
    ]
    return ComposedManuscript(
        outline=outline,
        drafts=[drafts[sid] for sid in outline.section_ids() if sid in drafts],
        figure_paths=[str(Path(p).relative_to(manuscript_dir)) for p in figure_paths],
        ethics=ethics,
        crossref_report=report,
        compile_outcome=outcome,
        main_tex=tex,
        claim_entries=claim_entries,
    )
