"""Request/response types for the model gateway."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, Field, field_validator, model_validator

from .canonical import canonical_digest
from .schema import ResponseSchema, check_schema

ROLES = ("system", "user", "assistant")


class Message(BaseModel):
    role: str
    text: str

    @field_validator("role")
    @classmethod
    def _role_known(cls, v: str) -> str:
        if v not in ROLES:
            raise ValueError(f"role must be one of {ROLES}")
        return v


class ModelRequest(BaseModel):
    provider_id: str
    model_id: str
    messages: list[Message]
    response_schema: ResponseSchema
    temperature: float = 0.0
    seed: int | None = None
    stage_tag: str

    @model_validator(mode="after")
    def _check(self) -> "ModelRequest":
        if not self.messages:
            raise ValueError("messages must be non-empty")
        if self.messages[0].role not in ("system", "user"):
            raise ValueError("first message must have role system or user")
        if not 0.0 <= self.temperature <= 1.0:
            raise ValueError("temperature must be in [0, 1]")
        check_schema(self.response_schema)
        return self

    def digest(self) -> str:
        """Stable hash over the canonicalized request, independent of field order."""
        return canonical_digest(
            {
                "provider_id": self.provider_id,
                "model_id": self.model_id,
                "messages": [[m.role, m.text] for m in self.messages],
                "response_schema": self.response_schema,
                "temperature": self.temperature,
                "seed": self.seed,
                "stage_tag": self.stage_tag,
            }
        )


class Usage(BaseModel):
    prompt_tokens: int = Field(ge=0)
    completion_tokens: int = Field(ge=0)

    @property
    def total_tokens(self) -> int:
        return self.prompt_tokens + self.completion_tokens


class ModelResponse(BaseModel):
    content: dict[str, Any]
    usage: Usage
    latency_ms: int = Field(ge=0)
    repair_attempts: int = Field(default=0, ge=0)
