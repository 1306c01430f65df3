"""Benchmark harness: scoring, tiering, case construction, evaluation, aggregation."""

from ..rubrics import Rubric, RubricDimension, RubricScale, load_rubric, load_rubric_file
from .aggregate import aggregate, render_report
from .build import BenchBuild, SourceRecord, build_bench, load_bench_case, load_bench_entries, load_source
from .cases import CaseAssets, build_cases
from .errors import (
    AnonymizationLeak,
    BenchError,
    CardinalityError,
    MissingAsset,
    MissingMetric,
    MixedRubric,
    ScoreParseFailure,
)
from .evaluate import anonymize, evaluate_with_rubric, find_identifier_tokens
from .scoring import (
    RECENCY_BASE_YEAR,
    REFERENCE_YEAR,
    ScoreContext,
    composite_from,
    normalized_dimensions,
    score_paper,
)
from .tiers import RANK_TO_TIER, partition_tiers
from .types import (
    AggregateReport,
    BenchCase,
    DimensionStats,
    INPUT_MODES,
    PackagedInputs,
    PaperEntry,
    Rater,
    RawMetrics,
    ScoreSheet,
    SuccessRate,
    TIERS,
)

__all__ = [
    "AggregateReport",
    "AnonymizationLeak",
    "BenchBuild",
    "BenchCase",
    "BenchError",
    "CardinalityError",
    "CaseAssets",
    "DimensionStats",
    "INPUT_MODES",
    "MissingAsset",
    "MissingMetric",
    "MixedRubric",
    "PackagedInputs",
    "PaperEntry",
    "RANK_TO_TIER",
    "RECENCY_BASE_YEAR",
    "REFERENCE_YEAR",
    "Rater",
    "RawMetrics",
    "Rubric",
    "RubricDimension",
    "RubricScale",
    "ScoreContext",
    "ScoreParseFailure",
    "ScoreSheet",
    "SourceRecord",
    "SuccessRate",
    "TIERS",
    "aggregate",
    "anonymize",
    "build_bench",
    "build_cases",
    "composite_from",
    "evaluate_with_rubric",
    "find_identifier_tokens",
    "load_bench_case",
    "load_bench_entries",
    "load_rubric",
    "load_rubric_file",
    "load_source",
    "normalized_dimensions",
    "partition_tiers",
    "render_report",
    "score_paper",
]
