"""Hypothesis generation, assessment, refinement, and plan finalization."""

from __future__ import annotations

import json
from pathlib import Path

from .._data import read_data_text
from ..evidence.types import EvidenceAnchor, EvidenceBase, TaskRepresentation
from ..gateway import Gateway
from ..rubrics import IDEA_RUBRIC_ID, load_rubric
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

STAGE_IDEATION = "ideation"

DEFAULT_ACCEPTANCE_MEAN = 3.5
DEFAULT_DIMENSION_FLOOR = 2.0
DEFAULT_MAX_ITERATIONS = 3
DEFAULT_FANOUT = 3


class UngroundedHypothesis(Exception):
    """No resolvable evidence links after one repair."""


class IterationExhausted(Exception):
    """Refinement budget spent; surface the best-so-far hypothesis instead."""


_CLINICIAN_SCHEMA = {
    "clinical_insight": "string",
    "concerns": {"list": "string"},
}

_ENGINEER_SCHEMA = {
    "clinical_rationale": "string",
    "technical_design": "string",
    "objectives": {"list": "string"},
    "evidence_links": {"list": {"record": {"record_id": "string", "locator": "string"}}},
}

_ASSESS_SCHEMA = {
    "scores": {
        "record": {
            "novelty": "number",
            "maturity": "number",
            "ethicality": "number",
            "generalizability": "number",
            "utility": "number",
            "interpretability": "number",
        }
    },
    "ethics_violation": "boolean",
    "ethics_reasons": {"list": "string"},
    "commentary": "string",
}

_PLAN_SCHEMA = {
    "algorithmic_rationale": "string",
    "metrics": {"list": "string"},
    "splits": "string",
    "baselines": {"list": "string"},
    "success_criteria": {"list": "string"},
}


def _evidence_digest_block(base: EvidenceBase) -> str:
    lines = [
        f"- ({item.anchor.record_id} | {item.anchor.locator}) [{item.kind}] {item.claim_text}"
        for item in base.items
    ]
    return "\n".join(lines) or "(no evidence items)"


def derive_verdict(
    scores: dict[str, float],
    ethics_violation: bool,
    acceptance_mean: float = DEFAULT_ACCEPTANCE_MEAN,
    dimension_floor: float = DEFAULT_DIMENSION_FLOOR,
    dimensions: tuple[str, ...] = ASSESSMENT_DIMENSIONS,
) -> str:
    """Pure verdict function: reject on ethics, then threshold on scores."""
    if ethics_violation:
        return VERDICT_REJECT
    mean = sum(scores[d] for d in dimensions) / len(dimensions)
    if mean >= acceptance_mean and all(scores[d] >= dimension_floor for d in dimensions):
        return VERDICT_ACCEPT
    return VERDICT_REFINE


def generate_hypotheses(
    base: EvidenceBase, k: int, gateway: Gateway, seed: int | None = None
) -> list[Hypothesis]:
    """Produce k hypotheses via alternating clinician/engineer persona passes."""
    if k < 1:
        raise ValueError("k must be >= 1")
    known = base.anchor_ids()
    evidence_block = _evidence_digest_block(base)

    hypotheses: list[Hypothesis] = []
    for index in range(k):
        clinician = gateway.ask(
            "You are a clinician reviewing a proposed research direction. Surface the "
            "clinical stakes and risks that any hypothesis must respect.",
            f"Task: {base.task.task_category} ({base.task.modality}); "
            f"context: {base.task.disease_context}.\nCandidate {index + 1} of {k}.\n"
            f"Evidence base:\n{evidence_block}",
            _CLINICIAN_SCHEMA,
            STAGE_IDEATION,
            temperature=gateway.generator_temperature,
            seed=seed,
        )
        engineer_user = (
            f"Task: {base.task.task_category} ({base.task.modality}).\n"
            f"Candidate {index + 1} of {k}.\n"
            f"Clinical insight: {clinician.content['clinical_insight']}\n"
            f"Clinical concerns: {'; '.join(clinician.content['concerns'])}\n"
            f"Evidence base:\n{evidence_block}\n"
            "Design a hypothesis grounded in the evidence items above; cite their anchors."
        )
        engineer_system = (
            "You are an engineer turning clinical insight into a concrete, buildable "
            "hypothesis. Every claim must link to evidence anchors from the given base."
        )
        response = gateway.ask(
            engineer_system,
            engineer_user,
            _ENGINEER_SCHEMA,
            STAGE_IDEATION,
            temperature=gateway.generator_temperature,
            seed=seed,
        )
        links = _resolve_links(response.content["evidence_links"], known)
        if links is None:
            response = gateway.ask(
                engineer_system,
                engineer_user + "\nYour previous links did not resolve; use only the "
                "anchor ids shown in the evidence base.",
                _ENGINEER_SCHEMA,
                STAGE_IDEATION,
                temperature=gateway.generator_temperature,
                seed=seed,
            )
            links = _resolve_links(response.content["evidence_links"], known)
            if links is None:
                raise UngroundedHypothesis("evidence links unresolvable after repair")
        hypotheses.append(
            Hypothesis(
                clinical_rationale=response.content["clinical_rationale"],
                technical_design=response.content["technical_design"],
                objectives=response.content["objectives"],
                evidence_links=links,
                iteration=0,
                persona_passes=["clinician", "engineer"],
            )
        )

    digests = [h.content_digest() for h in hypotheses]
    if len(set(digests)) != len(digests):
        raise ValueError("generated hypotheses collide on content digest")
    return hypotheses


def _resolve_links(raw_links: list[dict], known: set[str]) -> list[EvidenceAnchor] | None:
    if not raw_links:
        return None
    anchors = [EvidenceAnchor(record_id=l["record_id"], locator=l["locator"]) for l in raw_links]
    if any(a.record_id not in known for a in anchors):
        return None
    return anchors


def assess_hypothesis(
    h: Hypothesis,
    gateway: Gateway,
    acceptance_mean: float = DEFAULT_ACCEPTANCE_MEAN,
    dimension_floor: float = DEFAULT_DIMENSION_FLOOR,
    dimensions: tuple[str, ...] = ASSESSMENT_DIMENSIONS,
) -> Assessment:
    """Six-dimension judge scores with an ethics gate; verdict is derived, not asked."""
    rubric = load_rubric(IDEA_RUBRIC_ID)
    rubric_block = "\n".join(f"- {d.name}: {d.description}" for d in rubric.dimensions)
    response = gateway.ask(
        "You assess research hypotheses on the following dimensions (1-5 scale) and "
        "check medical-ethics compliance. Also comment on conceptual consistency, "
        f"empirical support, and practical executability.\nRubric:\n{rubric_block}",
        f"Hypothesis rationale: {h.clinical_rationale}\n"
        f"Technical design: {h.technical_design}\n"
        f"Objectives: {'; '.join(h.objectives)}",
        _ASSESS_SCHEMA,
        STAGE_IDEATION,
    )
    content = response.content
    scores = {name: float(value) for name, value in content["scores"].items()}
    verdict = derive_verdict(
        scores,
        content["ethics_violation"],
        acceptance_mean=acceptance_mean,
        dimension_floor=dimension_floor,
        dimensions=dimensions,
    )
    return Assessment(
        scores=scores,
        ethics_violation=content["ethics_violation"],
        ethics_reasons=content["ethics_reasons"],
        verdict=verdict,
        commentary=content.get("commentary", ""),
        dimensions=dimensions,
    )


def refine_hypothesis(
    h: Hypothesis,
    a: Assessment,
    gateway: Gateway,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> Hypothesis:
    """One refinement round; the weakest dimensions go into the request verbatim."""
    if a.verdict != VERDICT_REFINE:
        raise ValueError(f"refine requires a refine verdict, got {a.verdict!r}")
    if h.iteration >= max_iterations:
        raise IterationExhausted(f"iteration {h.iteration} reached max {max_iterations}")

    weakest = ", ".join(f"{name}={score}" for name, score in a.lowest_dimensions())
    response = gateway.ask(
        "You revise a research hypothesis to fix its weakest assessment dimensions "
        "while keeping it grounded in the same evidence base.",
        f"Current rationale: {h.clinical_rationale}\n"
        f"Current design: {h.technical_design}\n"
        f"Objectives: {'; '.join(h.objectives)}\n"
        f"Weakest dimensions: {weakest}\n"
        f"Assessor commentary: {a.commentary}",
        _ENGINEER_SCHEMA,
        STAGE_IDEATION,
        temperature=gateway.generator_temperature,
    )
    links = [
        EvidenceAnchor(record_id=l["record_id"], locator=l["locator"])
        for l in response.content["evidence_links"]
    ] or h.evidence_links
    return Hypothesis(
        clinical_rationale=response.content["clinical_rationale"],
        technical_design=response.content["technical_design"],
        objectives=response.content["objectives"],
        evidence_links=links,
        iteration=h.iteration + 1,
        persona_passes=[*h.persona_passes, "engineer"],
    )


def load_metric_table() -> dict[str, list[str]]:
    return json.loads(read_data_text("metrics_by_task.json"))


def finalize_plan(
    h: Hypothesis,
    assessment: Assessment,
    task: TaskRepresentation,
    gateway: Gateway,
    dataset_id: str,
    metric_table: dict[str, list[str]] | None = None,
    out_dir: str | Path | None = None,
    low_confidence: bool = False,
) -> ResearchPlan:
    """Formalize an accepted hypothesis into the executable research plan."""
    if assessment.verdict != VERDICT_ACCEPT:
        raise ValueError(f"finalize requires an accepted hypothesis, got {assessment.verdict!r}")
    table = metric_table if metric_table is not None else load_metric_table()
    allowed = table.get(task.task_category, [])

    system = (
        "You turn an accepted hypothesis into a research plan: algorithmic rationale, "
        "evaluation protocol, and concrete success criteria."
    )
    user = (
        f"Task: {task.task_category} ({task.modality}).\n"
        f"Hypothesis design: {h.technical_design}\n"
        f"Canonical metrics for this task: {', '.join(allowed) or '(none listed)'}\n"
        "Pick at least one canonical metric."
    )
    response = gateway.ask(system, user, _PLAN_SCHEMA, STAGE_IDEATION)
    content = response.content
    if allowed and not set(content["metrics"]) & set(allowed):
        response = gateway.ask(
            system,
            user + f"\nYour metrics {content['metrics']} include none of the canonical "
            "set; include at least one.",
            _PLAN_SCHEMA,
            STAGE_IDEATION,
        )
        content = response.content
        if not set(content["metrics"]) & set(allowed):
            raise ValueError("plan metrics exclude every canonical task metric after repair")

    plan = ResearchPlan(
        hypothesis=h,
        algorithmic_rationale=content["algorithmic_rationale"],
        evaluation_protocol=EvaluationProtocol(
            metrics=content["metrics"],
            splits=content["splits"],
            baselines=content["baselines"],
        ),
        dataset_binding=dataset_id,
        success_criteria=content["success_criteria"],
        low_confidence=low_confidence,
    )
    if out_dir is not None:
        persist_plan(plan, out_dir)
    return plan


def persist_plan(plan: ResearchPlan, out_dir: str | Path) -> Path:
    path = Path(out_dir) / "plan.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(plan.model_dump(), indent=2, sort_keys=True), encoding="utf-8")
    return path


def load_plan(out_dir: str | Path) -> ResearchPlan:
    return ResearchPlan.model_validate(
        json.loads((Path(out_dir) / "plan.json").read_text("utf-8"))
    )


def select_best(pairs: list[tuple[Hypothesis, Assessment]]) -> tuple[Hypothesis, Assessment]:
    """Best-of selection: highest mean, then fewer iterations, then digest order."""
    if not pairs:
        raise ValueError("no hypotheses to select from")
    return min(
        pairs,
        key=lambda pair: (-pair[1].mean_score(), pair[0].iteration, pair[0].content_digest()),
    )
