"""Uniform access to language-model providers with validation, budgets, and replay."""

from .backends import (
    Backend,
    LiveBackend,
    RateLimiter,
    RawReply,
    RecordingBackend,
    ReplayBackend,
)
from .budget import Budget, StageCeiling, StageConsumption, charge, unlimited_budget
from .canonical import canonical_digest, canonical_json
from .errors import (
    BudgetExhausted,
    DuplicateDigestConflict,
    GatewayError,
    ProviderError,
    SchemaViolation,
    TranscriptMiss,
)
from .schema import ResponseSchema, check_schema, validate_content
from .service import Gateway, build_repair_request, complete_structured
from .transcript import (
    Transcript,
    TranscriptMeta,
    load_transcript,
    record_transcript,
    save_transcript,
)
from .types import Message, ModelRequest, ModelResponse, Usage

__all__ = [
    "Backend",
    "Budget",
    "BudgetExhausted",
    "DuplicateDigestConflict",
    "Gateway",
    "GatewayError",
    "LiveBackend",
    "Message",
    "ModelRequest",
    "ModelResponse",
    "ProviderError",
    "RateLimiter",
    "RawReply",
    "RecordingBackend",
    "ReplayBackend",
    "ResponseSchema",
    "SchemaViolation",
    "StageCeiling",
    "StageConsumption",
    "Transcript",
    "TranscriptMeta",
    "TranscriptMiss",
    "Usage",
    "build_repair_request",
    "canonical_digest",
    "canonical_json",
    "charge",
    "check_schema",
    "complete_structured",
    "load_transcript",
    "record_transcript",
    "save_transcript",
    "unlimited_budget",
    "validate_content",
]
