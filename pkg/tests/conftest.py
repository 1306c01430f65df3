"""Shared test backends and helpers."""

from __future__ import annotations

import pytest

from medlab.gateway import Gateway, RawReply, Usage


class RespondingBackend:
    """Backend driven by a responder(request) -> content callable."""

    def __init__(self, responder):
        self.responder = responder
        self.requests = []

    def ask(self, request):
        self.requests.append(request)
        content = self.responder(request)
        return RawReply(content, Usage(prompt_tokens=11, completion_tokens=9), 2)


def make_gateway(responder) -> Gateway:
    return Gateway(RespondingBackend(responder))


@pytest.fixture
def gateway_factory():
    return make_gateway
