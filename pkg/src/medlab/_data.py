"""Access to packaged data files."""

from __future__ import annotations

from importlib import resources


def read_data_text(*parts: str) -> str:
    node = resources.files("medlab").joinpath("data")
    for part in parts:
        node = node.joinpath(part)
    return node.read_text("utf-8")
