"""Pure-function run judgment against the execution success criteria.

Checks apply in fixed precedence: runtime_error, timeout,
gradient_explosion, non_decreasing_loss, missing_weights, success.
Identical (record, policy) inputs always yield identical verdicts.
"""

from __future__ import annotations

from pydantic import BaseModel, Field

from .types import EvidencePointer, MetricEvent, RunRecord, Verdict


class JudgePolicy(BaseModel):
    smoothing_window: int = Field(default=5, ge=1)
    decrease_delta: float = Field(default=0.05, ge=0, lt=1)
    grad_max: float = Field(default=1e4, gt=0)
    grad_consecutive: int = Field(default=3, ge=1)
    min_train_events: int = Field(default=4, ge=2)
    strict_monotone: bool = False


def moving_average(values: list[float], window: int) -> list[float]:
    """Trailing moving average clipped at the series start; same length out."""
    smoothed = []
    acc = 0.0
    for i, value in enumerate(values):
        acc += value
        if i >= window:
            acc -= values[i - window]
        count = min(i + 1, window)
        smoothed.append(acc / count)
    return smoothed


def least_squares_slope(values: list[float]) -> float:
    n = len(values)
    x_mean = (n - 1) / 2.0
    y_mean = sum(values) / n
    num = sum((i - x_mean) * (y - y_mean) for i, y in enumerate(values))
    den = sum((i - x_mean) ** 2 for i in range(n))
    return num / den if den else 0.0


def loss_trend_ok(losses: list[float], policy: JudgePolicy) -> bool:
    """Decreasing-trajectory test over the smoothed train-loss series."""
    if policy.strict_monotone:
        return all(b < a for a, b in zip(losses, losses[1:]))
    smoothed = moving_average(losses, policy.smoothing_window)
    slope = least_squares_slope(smoothed)
    return slope < 0 and smoothed[-1] <= (1 - policy.decrease_delta) * smoothed[0]


def _metrics_pointer(index: int) -> EvidencePointer:
    return EvidencePointer(log_ref="logs/metrics.jsonl", line_range=(index + 1, index + 1))


def _explosion_evidence(events: list[MetricEvent], policy: JudgePolicy) -> tuple[str, list[EvidencePointer]] | None:
    for i, event in enumerate(events):
        if not event.loss_finite():
            return (f"non-finite loss at step {event.step} ({event.split})", [_metrics_pointer(i)])
        if not event.grad_finite():
            return (
                f"non-finite grad_norm at step {event.step} ({event.split})",
                [_metrics_pointer(i)],
            )
    run = 0
    start = 0
    for i, event in enumerate(events):
        if event.split != "train":
            continue
        if event.grad_norm is not None and event.grad_norm > policy.grad_max:
            if run == 0:
                start = i
            run += 1
            if run >= policy.grad_consecutive:
                return (
                    f"grad_norm above {policy.grad_max:g} for {run} consecutive events",
                    [EvidencePointer(log_ref="logs/metrics.jsonl", line_range=(start + 1, i + 1))],
                )
        else:
            run = 0
    return None


def judge_run(record: RunRecord, policy: JudgePolicy | None = None) -> Verdict:
    policy = policy or JudgePolicy()

    # runtime completion
    for outcome in record.stage_outcomes:
        if outcome.exit_status != 0 and not outcome.timed_out:
            return Verdict(
                status="failure",
                failure_class="runtime_error",
                feedback=(
                    f"stage {outcome.stage_name} exited with status {outcome.exit_status}; "
                    "inspect its stderr capture and fix the command or environment"
                ),
                evidence_pointers=[
                    EvidencePointer(log_ref=f"logs/{outcome.stage_name}.stderr")
                ],
            )
    for outcome in record.stage_outcomes:
        if outcome.timed_out:
            return Verdict(
                status="failure",
                failure_class="timeout",
                feedback=(
                    f"stage {outcome.stage_name} exceeded its timeout after "
                    f"{outcome.wall_time_s:.1f}s; reduce work or raise timeout_s"
                ),
                evidence_pointers=[
                    EvidencePointer(log_ref=f"logs/{outcome.stage_name}.stdout")
                ],
            )

    # gradient stability
    explosion = _explosion_evidence(record.metric_events, policy)
    if explosion is not None:
        feedback, pointers = explosion
        return Verdict(
            status="failure",
            failure_class="gradient_explosion",
            feedback=feedback + "; lower the learning rate or clip gradients",
            evidence_pointers=pointers,
        )

    # loss trajectory
    train = record.train_events()
    if len(train) < policy.min_train_events:
        return Verdict(
            status="failure",
            failure_class="non_decreasing_loss",
            feedback=(
                f"insufficient metric events: {len(train)} train events < "
                f"{policy.min_train_events}; instrument the training loop"
            ),
            evidence_pointers=[EvidencePointer(log_ref="logs/metrics.jsonl")],
        )
    losses = [e.loss for e in train]
    if not loss_trend_ok(losses, policy):
        return Verdict(
            status="failure",
            failure_class="non_decreasing_loss",
            feedback=(
                "train loss is not on a decreasing trajectory "
                f"(first={losses[0]:.4g}, last={losses[-1]:.4g}); adjust optimization"
            ),
            evidence_pointers=[
                EvidencePointer(log_ref="logs/metrics.jsonl", line_range=(1, len(record.metric_events)))
            ],
        )

    # weight validity
    manifest = record.weights_manifest
    problem = None
    if manifest is None:
        problem = "no weights manifest was produced"
    elif not manifest.weights:
        problem = "weights manifest lists no weight files"
    else:
        artifact_set = set(record.artifacts)
        for entry in manifest.weights:
            if entry.bytes <= 0:
                problem = f"weight file {entry.path} is empty"
                break
            if not entry.checksum_well_formed():
                problem = f"weight file {entry.path} has a malformed checksum"
                break
            if entry.path not in artifact_set:
                problem = f"weight file {entry.path} is not among run artifacts"
                break
    if problem is not None:
        return Verdict(
            status="failure",
            failure_class="missing_weights",
            feedback=problem + "; save model weights and register them in the manifest",
            evidence_pointers=[EvidencePointer(log_ref="logs/weights_manifest.json")],
        )

    return Verdict(status="success")
