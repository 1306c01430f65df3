"""Evidence module: task formalization, retrieval, and method primitives."""

from .agents import (
    analyze_task,
    build_evidence_base,
    explore_paradigms,
    load_evidence_base,
    persist_evidence_base,
    survey_reference,
)
from .errors import (
    AbstractionLeak,
    DanglingAnchor,
    EvidenceError,
    NoGroundedCandidate,
    TransportError,
    UnmappableTask,
)
from .search import (
    CachingSearchClient,
    FixtureSearchClient,
    LiveSearchClient,
    search_literature,
)
from .stoplist import build_stoplist, find_leaks
from .taxonomy import (
    is_valid_modality,
    is_valid_task,
    load_taxonomy,
    modalities,
    modality_of_task,
    tasks,
    tasks_for,
)
from .types import (
    CodeRecord,
    EvidenceAnchor,
    EvidenceBase,
    EvidenceItem,
    MappedComponent,
    MethodPrimitive,
    ParadigmCandidate,
    PaperRecord,
    TaskRepresentation,
)

__all__ = [
    "AbstractionLeak",
    "CachingSearchClient",
    "CodeRecord",
    "DanglingAnchor",
    "EvidenceAnchor",
    "EvidenceBase",
    "EvidenceError",
    "EvidenceItem",
    "FixtureSearchClient",
    "LiveSearchClient",
    "MappedComponent",
    "MethodPrimitive",
    "NoGroundedCandidate",
    "ParadigmCandidate",
    "PaperRecord",
    "TaskRepresentation",
    "TransportError",
    "UnmappableTask",
    "analyze_task",
    "build_evidence_base",
    "build_stoplist",
    "explore_paradigms",
    "find_leaks",
    "is_valid_modality",
    "is_valid_task",
    "load_evidence_base",
    "load_taxonomy",
    "modalities",
    "modality_of_task",
    "persist_evidence_base",
    "search_literature",
    "survey_reference",
    "tasks",
    "tasks_for",
]
