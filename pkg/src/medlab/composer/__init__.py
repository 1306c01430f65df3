"""Manuscript composer: drafting, figures, ethics, crossrefs, self-healing compile."""

from .adapters import PdflatexAdapter, ScriptedCompilerAdapter, WasmTexAdapter, default_engine_dir
from .bibliography import BibEntry, cited_keys_from_aux, emit_bbl, parse_bib, write_bib_database
from .compilation import (
    AppliedFix,
    CompileOutcome,
    CompileResult,
    CompilerAdapter,
    DEFAULT_MAX_ITER,
    ERROR_CLASSES,
    MaxIterationsExceeded,
    classify_log,
    compile_document,
    parse_log,
    rerun_warnings,
)
from .crossref import (
    CrossrefReport,
    Finding,
    TokenizeError,
    fix_duplicate_labels,
    resolve_crossrefs,
)
from .drafting import ClaimLink, SectionDraft, UnresolvedClaim, clip_summary, draft_section
from .ethics import (
    EthicsEntry,
    EthicsStatement,
    NOT_DOCUMENTED,
    load_policy_instructions,
    render_statement,
    review_ethics,
)
from .figures import bar_chart, block_diagram, generate_figures, line_plot
from .manuscript import (
    ClaimEntry,
    ComposedManuscript,
    assemble_tex,
    compose_manuscript,
    papers_to_bib,
)
from .narrative import (
    ChangeLogEntry,
    EnhancementResult,
    enhance_narrative,
    reference_commands,
)
from .outline import Outline, SectionNode, plan_outline, table_binding

__all__ = [
    "AppliedFix",
    "BibEntry",
    "ChangeLogEntry",
    "ClaimEntry",
    "ClaimLink",
    "CompileOutcome",
    "CompileResult",
    "CompilerAdapter",
    "ComposedManuscript",
    "CrossrefReport",
    "DEFAULT_MAX_ITER",
    "ERROR_CLASSES",
    "EnhancementResult",
    "EthicsEntry",
    "EthicsStatement",
    "Finding",
    "MaxIterationsExceeded",
    "NOT_DOCUMENTED",
    "Outline",
    "PdflatexAdapter",
    "ScriptedCompilerAdapter",
    "SectionDraft",
    "SectionNode",
    "TokenizeError",
    "UnresolvedClaim",
    "WasmTexAdapter",
    "assemble_tex",
    "bar_chart",
    "block_diagram",
    "cited_keys_from_aux",
    "classify_log",
    "clip_summary",
    "compile_document",
    "compose_manuscript",
    "default_engine_dir",
    "draft_section",
    "emit_bbl",
    "enhance_narrative",
    "fix_duplicate_labels",
    "generate_figures",
    "line_plot",
    "load_policy_instructions",
    "papers_to_bib",
    "parse_bib",
    "parse_log",
    "plan_outline",
    "render_statement",
    "rerun_warnings",
    "resolve_crossrefs",
    "reference_commands",
    "review_ethics",
    "table_binding",
    "write_bib_database",
]
