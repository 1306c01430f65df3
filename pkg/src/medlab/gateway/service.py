"""Structured completion with validation, bounded repair, and budgeting."""

from __future__ import annotations

import threading
from typing import Any

from .backends import Backend, RawReply
from .budget import Budget, charge, unlimited_budget
from .errors import BudgetExhausted, SchemaViolation
from .schema import validate_content
from .types import Message, ModelRequest, ModelResponse

DEFAULT_MAX_ATTEMPTS = 2  # total validation attempts: initial ask + one repair re-ask


def build_repair_request(request: ModelRequest, errors: list[str]) -> ModelRequest:
    """Re-ask with the validation errors appended as a user message."""
    complaint = (
        "The previous reply did not match the required schema. Violations:\n"
        + "\n".join(f"- {e}" for e in errors)
        + "\nReply again with a JSON object that satisfies the schema exactly."
    )
    return request.model_copy(
        update={"messages": [*request.messages, Message(role="user", text=complaint)]}
    )


def complete_structured(
    request: ModelRequest,
    backend: Backend,
    budget: Budget | None = None,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
) -> ModelResponse:
    """Ask the backend and validate against the request's response schema.

    On violation the request is re-asked with the errors appended, up to
    max_attempts total validations; budget is charged for every dispatch.
    """
    budget = budget if budget is not None else unlimited_budget()
    if not budget.has_capacity(request.stage_tag):
        raise BudgetExhausted(f"stage {request.stage_tag!r} has no remaining capacity")

    current = request
    total_latency = 0
    last_errors: list[str] = []
    for attempt in range(max_attempts):
        budget.count_request(current.stage_tag)
        reply: RawReply = backend.ask(current)
        charge(budget, current.stage_tag, reply.usage)
        total_latency += reply.latency_ms
        errors = validate_content(reply.content, request.response_schema)
        if not errors:
            return ModelResponse(
                content=reply.content,
                usage=reply.usage,
                latency_ms=total_latency,
                repair_attempts=attempt,
            )
        last_errors = errors
        if attempt + 1 < max_attempts:
            current = build_repair_request(current, errors)
    raise SchemaViolation(
        f"content failed validation after {max_attempts} attempts", errors=last_errors
    )


class Gateway:
    """Convenience wrapper binding a backend, a budget, and a call log.

    The call log records (stage_tag, digest) in dispatch order so callers
    can assert ordering properties such as the ethics gate running first.
    """

    def __init__(
        self,
        backend: Backend,
        budget: Budget | None = None,
        max_attempts: int = DEFAULT_MAX_ATTEMPTS,
        provider_id: str = "local",
        model_id: str = "default",
        generator_temperature: float = 0.2,
    ):
        self.backend = backend
        self.budget = budget if budget is not None else unlimited_budget()
        self.max_attempts = max_attempts
        self.provider_id = provider_id
        self.model_id = model_id
        # evaluator/judge roles stay at temperature 0; generator roles use this
        self.generator_temperature = generator_temperature
        self.call_log: list[tuple[str, str]] = []
        self._log_lock = threading.Lock()

    def build_request(
        self,
        messages: list[Message],
        response_schema: dict,
        stage_tag: str,
        temperature: float = 0.0,
        seed: int | None = None,
    ) -> ModelRequest:
        return ModelRequest(
            provider_id=self.provider_id,
            model_id=self.model_id,
            messages=messages,
            response_schema=response_schema,
            temperature=temperature,
            seed=seed,
            stage_tag=stage_tag,
        )

    def ask(
        self,
        system: str,
        user: str,
        response_schema: dict,
        stage_tag: str,
        temperature: float = 0.0,
        seed: int | None = None,
    ) -> ModelResponse:
        request = self.build_request(
            [Message(role="system", text=system), Message(role="user", text=user)],
            response_schema,
            stage_tag,
            temperature=temperature,
            seed=seed,
        )
        return self.complete(request)

    def complete(self, request: ModelRequest) -> ModelResponse:
        with self._log_lock:
            self.call_log.append((request.stage_tag, request.digest()))
        return complete_structured(
            request, self.backend, self.budget, max_attempts=self.max_attempts
        )

    def stages_called(self) -> list[str]:
        return [stage for stage, _ in self.call_log]


def expect_fields(content: dict[str, Any], *names: str) -> tuple:
    """Fetch fields the schema already guaranteed; keeps call sites terse."""
    return tuple(content[n] for n in names)
