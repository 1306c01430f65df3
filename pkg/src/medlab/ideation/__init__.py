"""Ideation: clinician/engineer co-reasoning, assessment, and research plans."""

from .ops import (
    DEFAULT_ACCEPTANCE_MEAN,
    DEFAULT_DIMENSION_FLOOR,
    DEFAULT_FANOUT,
    DEFAULT_MAX_ITERATIONS,
    IterationExhausted,
    UngroundedHypothesis,
    assess_hypothesis,
    derive_verdict,
    finalize_plan,
    generate_hypotheses,
    load_metric_table,
    load_plan,
    persist_plan,
    refine_hypothesis,
    select_best,
)
from .types import (
    ASSESSMENT_DIMENSIONS,
    Assessment,
    EvaluationProtocol,
    Hypothesis,
    ResearchPlan,
    VERDICT_ACCEPT,
    VERDICT_REFINE,
    VERDICT_REJECT,
)

__all__ = [
    "ASSESSMENT_DIMENSIONS",
    "Assessment",
    "DEFAULT_ACCEPTANCE_MEAN",
    "DEFAULT_DIMENSION_FLOOR",
    "DEFAULT_FANOUT",
    "DEFAULT_MAX_ITERATIONS",
    "EvaluationProtocol",
    "Hypothesis",
    "IterationExhausted",
    "ResearchPlan",
    "UngroundedHypothesis",
    "VERDICT_ACCEPT",
    "VERDICT_REFINE",
    "VERDICT_REJECT",
    "assess_hypothesis",
    "derive_verdict",
    "finalize_plan",
    "generate_hypotheses",
    "load_metric_table",
    "load_plan",
    "persist_plan",
    "refine_hypothesis",
    "select_best",
]
