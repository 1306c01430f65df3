"""Per-stage token and request budgets.

Charging past a ceiling is an error, never a silent clamp, and a failed
charge leaves the budget untouched.
"""

from __future__ import annotations

import threading

from pydantic import BaseModel, Field, PrivateAttr

from .errors import BudgetExhausted
from .types import Usage


class StageCeiling(BaseModel):
    max_tokens: int = Field(ge=0)
    max_requests: int = Field(ge=0)


class StageConsumption(BaseModel):
    tokens: int = Field(default=0, ge=0)
    requests: int = Field(default=0, ge=0)


class Budget(BaseModel):
    ceilings: dict[str, StageCeiling] = Field(default_factory=dict)
    consumed: dict[str, StageConsumption] = Field(default_factory=dict)

    _lock: threading.Lock = PrivateAttr(default_factory=threading.Lock)

    def ceiling_for(self, stage_tag: str) -> StageCeiling | None:
        return self.ceilings.get(stage_tag)

    def consumed_for(self, stage_tag: str) -> StageConsumption:
        return self.consumed.get(stage_tag, StageConsumption())

    def has_capacity(self, stage_tag: str) -> bool:
        """True when one more request plausibly fits under the stage ceiling."""
        ceiling = self.ceilings.get(stage_tag)
        if ceiling is None:
            return True
        used = self.consumed_for(stage_tag)
        return used.requests + 1 <= ceiling.max_requests and used.tokens < ceiling.max_tokens

    def count_request(self, stage_tag: str) -> None:
        """Consume one request slot; raises before exceeding max_requests."""
        with self._lock:
            ceiling = self.ceilings.get(stage_tag)
            used = self.consumed.get(stage_tag, StageConsumption())
            if ceiling is not None and used.requests + 1 > ceiling.max_requests:
                raise BudgetExhausted(
                    f"stage {stage_tag!r}: request {used.requests + 1} would exceed "
                    f"ceiling {ceiling.max_requests}"
                )
            self.consumed[stage_tag] = StageConsumption(
                tokens=used.tokens, requests=used.requests + 1
            )


def unlimited_budget() -> Budget:
    return Budget()


def charge(budget: Budget, stage_tag: str, usage: Usage) -> Budget:
    """Atomically add token usage to the stage's consumption.

    A zero-token charge leaves the budget unchanged. Raises
    BudgetExhausted (without mutating) when the charge would exceed the
    stage's token ceiling. Returns the same budget for chaining.
    """
    if usage.prompt_tokens < 0 or usage.completion_tokens < 0:
        raise ValueError("usage token counts must be >= 0")
    if usage.total_tokens == 0:
        return budget
    with budget._lock:
        ceiling = budget.ceilings.get(stage_tag)
        used = budget.consumed.get(stage_tag, StageConsumption())
        new_tokens = used.tokens + usage.total_tokens
        if ceiling is not None and new_tokens > ceiling.max_tokens:
            raise BudgetExhausted(
                f"stage {stage_tag!r}: {new_tokens} tokens would exceed ceiling {ceiling.max_tokens}"
            )
        budget.consumed[stage_tag] = StageConsumption(tokens=new_tokens, requests=used.requests)
    return budget
