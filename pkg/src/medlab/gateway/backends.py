"""Gateway backends: live provider transport, deterministic replay, recording.

Backends return raw replies; schema validation and repair live in the
service layer so every backend is interchangeable.
"""

from __future__ import annotations

import json
import os
import threading
import time
from typing import Any, Callable, Protocol

import httpx

from .errors import ProviderError, TranscriptMiss
from .transcript import Transcript, record_transcript
from .types import ModelRequest, ModelResponse, Usage


class RawReply:
    """Unvalidated backend reply."""

    __slots__ = ("content", "usage", "latency_ms")

    def __init__(self, content: Any, usage: Usage, latency_ms: int):
        self.content = content
        self.usage = usage
        self.latency_ms = latency_ms


class Backend(Protocol):
    def ask(self, request: ModelRequest) -> RawReply: ...


class ReplayBackend:
    """Serves recorded replies by request digest; performs no network I/O."""

    def __init__(self, transcript: Transcript):
        self._transcript = transcript

    def ask(self, request: ModelRequest) -> RawReply:
        digest = request.digest()
        entry = self._transcript.lookup(digest)
        if entry is None:
            raise TranscriptMiss(digest)
        return RawReply(entry.content, entry.usage, entry.latency_ms)


class RecordingBackend:
    """Wraps another backend and records every raw exchange."""

    def __init__(self, inner: Backend):
        self._inner = inner
        self._pairs: list[tuple[ModelRequest, ModelResponse]] = []

    def ask(self, request: ModelRequest) -> RawReply:
        reply = self._inner.ask(request)
        self._pairs.append(
            (
                request,
                ModelResponse(content=reply.content, usage=reply.usage, latency_ms=reply.latency_ms),
            )
        )
        return reply

    def transcript(self) -> Transcript:
        return record_transcript(self._pairs)


class RateLimiter:
    """Serializes dispatch bursts: at most one request per interval per provider."""

    def __init__(self, min_interval_s: float = 0.0):
        self.min_interval_s = min_interval_s
        self._last: dict[str, float] = {}
        self._lock = threading.Lock()

    def wait(self, provider_id: str) -> None:
        if self.min_interval_s <= 0:
            return
        with self._lock:
            now = time.monotonic()
            last = self._last.get(provider_id, 0.0)
            delay = self.min_interval_s - (now - last)
            if delay > 0:
                time.sleep(delay)
                now = time.monotonic()
            self._last[provider_id] = now


Transport = Callable[[str, dict, dict], tuple[int, dict]]
"""(url, headers, body) -> (status_code, response json)."""


def httpx_transport(timeout_s: float = 60.0) -> Transport:
    def send(url: str, headers: dict, body: dict) -> tuple[int, dict]:
        response = httpx.post(url, headers=headers, json=body, timeout=timeout_s)
        return response.status_code, response.json()

    return send


DEFAULT_ENDPOINTS = {
    "openai": "https://api.openai.com/v1/chat/completions",
}


class LiveBackend:
    """HTTPS provider backend speaking the chat-completions JSON shape.

    Credentials come from MAS_<PROVIDER>_API_KEY environment variables.
    The transport is injectable so tests can count or fake dispatches.
    """

    def __init__(
        self,
        transport: Transport | None = None,
        endpoints: dict[str, str] | None = None,
        max_retries: int = 2,
        rate_limiter: RateLimiter | None = None,
    ):
        self._transport = transport or httpx_transport()
        self._endpoints = {**DEFAULT_ENDPOINTS, **(endpoints or {})}
        self._max_retries = max_retries
        self._limiter = rate_limiter or RateLimiter()

    def _credentials(self, provider_id: str) -> str:
        var = f"MAS_{provider_id.upper()}_API_KEY"
        key = os.environ.get(var)
        if not key:
            raise ProviderError(f"missing credentials: set {var}")
        return key

    def ask(self, request: ModelRequest) -> RawReply:
        url = self._endpoints.get(request.provider_id)
        if url is None:
            raise ProviderError(f"no endpoint configured for provider {request.provider_id!r}")
        headers = {
            "Authorization": f"Bearer {self._credentials(request.provider_id)}",
            "Content-Type": "application/json",
        }
        body = {
            "model": request.model_id,
            "messages": [{"role": m.role, "content": m.text} for m in request.messages],
            "temperature": request.temperature,
            "response_format": {"type": "json_object"},
        }
        if request.seed is not None:
            body["seed"] = request.seed

        last_error: Exception | None = None
        for attempt in range(self._max_retries + 1):
            self._limiter.wait(request.provider_id)
            started = time.monotonic()
            try:
                status, payload = self._transport(url, headers, body)
            except Exception as exc:  # transport-level failure
                last_error = exc
                continue
            latency_ms = int((time.monotonic() - started) * 1000)
            if status >= 500 or status == 429:
                last_error = ProviderError(f"HTTP {status}", retries=attempt)
                continue
            if status != 200:
                raise ProviderError(f"HTTP {status}: {payload}", retries=attempt)
            return self._parse_reply(payload, latency_ms)
        raise ProviderError(f"provider unreachable after {self._max_retries + 1} attempts: {last_error}",
                            retries=self._max_retries)

    @staticmethod
    def _parse_reply(payload: dict, latency_ms: int) -> RawReply:
        try:
            text = payload["choices"][0]["message"]["content"]
            usage = payload.get("usage", {})
            reply_usage = Usage(
                prompt_tokens=int(usage.get("prompt_tokens", 0)),
                completion_tokens=int(usage.get("completion_tokens", 0)),
            )
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"malformed provider payload: {exc}")
        try:
            content = json.loads(text)
        except json.JSONDecodeError:
            content = {"_raw": text}
        return RawReply(content, reply_usage, latency_ms)
