"""Recorded request/response transcripts for deterministic replay.

On disk a transcript is JSON-lines: a header object carrying metadata,
then one object per entry with the request digest, a short request
summary, and the full response. The extension is .transcript.jsonl.
"""

from __future__ import annotations

import json
from pathlib import Path

from pydantic import BaseModel, Field

from .errors import DuplicateDigestConflict
from .types import ModelRequest, ModelResponse


class TranscriptMeta(BaseModel):
    created_at: str = "1970-01-01T00:00:00Z"
    description: str = ""


class Transcript(BaseModel):
    entries: dict[str, ModelResponse] = Field(default_factory=dict)
    metadata: TranscriptMeta = Field(default_factory=TranscriptMeta)
    summaries: dict[str, str] = Field(default_factory=dict)

    def lookup(self, digest: str) -> ModelResponse | None:
        return self.entries.get(digest)

    def __len__(self) -> int:
        return len(self.entries)


def record_transcript(
    pairs: list[tuple[ModelRequest, ModelResponse]],
    metadata: TranscriptMeta | None = None,
) -> Transcript:
    """Build a transcript from ordered (request, response) pairs.

    Re-recording an identical pair is idempotent; recording a different
    response under an existing digest raises DuplicateDigestConflict.
    """
    transcript = Transcript(metadata=metadata or TranscriptMeta())
    for request, response in pairs:
        digest = request.digest()
        existing = transcript.entries.get(digest)
        if existing is not None:
            if existing.model_dump() != response.model_dump():
                raise DuplicateDigestConflict(digest)
            continue
        transcript.entries[digest] = response
        transcript.summaries[digest] = summarize_request(request)
    return transcript


def summarize_request(request: ModelRequest) -> str:
    head = request.messages[0].text.replace("\n", " ")
    if len(head) > 120:
        head = head[:117] + "..."
    return f"[{request.stage_tag}] {request.model_id}: {head}"


def save_transcript(transcript: Transcript, path: str | Path) -> None:
    path = Path(path)
    lines = [json.dumps({"meta": transcript.metadata.model_dump()}, sort_keys=True)]
    for digest in sorted(transcript.entries):
        lines.append(
            json.dumps(
                {
                    "digest": digest,
                    "request_summary": transcript.summaries.get(digest, ""),
                    "response": transcript.entries[digest].model_dump(),
                },
                sort_keys=True,
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_transcript(path: str | Path) -> Transcript:
    path = Path(path)
    transcript = Transcript()
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        if "meta" in obj:
            transcript.metadata = TranscriptMeta.model_validate(obj["meta"])
            continue
        digest = obj["digest"]
        response = ModelResponse.model_validate(obj["response"])
        existing = transcript.entries.get(digest)
        if existing is not None and existing.model_dump() != response.model_dump():
            raise DuplicateDigestConflict(digest)
        transcript.entries[digest] = response
        transcript.summaries[digest] = obj.get("request_summary", "")
    return transcript
