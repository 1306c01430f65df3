"""Rubric-based judge evaluation with anonymization enforcement."""

from __future__ import annotations

import re

from ..gateway import Gateway
from ..rubrics import Rubric
from .errors import AnonymizationLeak, ScoreParseFailure
from .types import Rater, ScoreSheet

STAGE_BENCH = "bench"

DEFAULT_IDENTIFIER_TOKENS = ("medlab",)


def _token_pattern(token: str) -> re.Pattern:
    return re.compile(rf"(?<!\w){re.escape(token)}(?!\w)", re.IGNORECASE)


def find_identifier_tokens(text: str, tokens: tuple[str, ...]) -> list[str]:
    return [t for t in tokens if _token_pattern(t).search(text)]


def anonymize(text: str, tokens: tuple[str, ...] = DEFAULT_IDENTIFIER_TOKENS) -> str:
    """Whole-word redaction of system/model identifiers."""
    for token in tokens:
        text = _token_pattern(token).sub("[system]", text)
    return text


def evaluate_with_rubric(
    subject: str,
    rubric: Rubric,
    gateway: Gateway,
    subject_id: str = "subject",
    identifier_tokens: tuple[str, ...] = DEFAULT_IDENTIFIER_TOKENS,
) -> ScoreSheet:
    """Judge the anonymized subject on every rubric dimension."""
    leaked = find_identifier_tokens(subject, identifier_tokens)
    if leaked:
        raise AnonymizationLeak(leaked)

    schema = {"scores": {"record": {name: "number" for name in rubric.dimension_names()}}}
    rubric_block = "\n".join(
        f"- {d.name}: {d.description}" for d in rubric.dimensions
    )
    system = (
        "You are a standardized evaluator. Score the subject on each rubric dimension "
        f"using the scale [{rubric.scale.min:g}, {rubric.scale.max:g}]."
    )
    user = f"Rubric ({rubric.rubric_id}):\n{rubric_block}\n\nSubject:\n{subject}"

    response = gateway.ask(system, user, schema, STAGE_BENCH)
    scores = {k: float(v) for k, v in response.content["scores"].items()}
    if any(not rubric.in_range(v) for v in scores.values()):
        response = gateway.ask(
            system,
            user + f"\nYour previous scores {scores} left the allowed range; stay within "
            f"[{rubric.scale.min:g}, {rubric.scale.max:g}].",
            schema,
            STAGE_BENCH,
        )
        scores = {k: float(v) for k, v in response.content["scores"].items()}
        bad = {k: v for k, v in scores.items() if not rubric.in_range(v)}
        if bad:
            raise ScoreParseFailure(f"scores outside the rubric scale after repair: {bad}")

    sheet = ScoreSheet(
        subject_id=subject_id,
        rubric_id=rubric.rubric_id,
        rater=Rater(kind="llm", rater_id=gateway.model_id),
        scores=scores,
    )
    sheet.validate_against(rubric)
    return sheet
