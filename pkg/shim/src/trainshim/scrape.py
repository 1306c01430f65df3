"""Stdout scraping fallback for uninstrumented scripts.

Patterns are regexes with named groups; "loss" is mandatory, "step" and
"grad_norm" optional. The first matching pattern wins. Non-matching
lines pass through to the captured stdout untouched.
"""

from __future__ import annotations

import re

from .errors import SchemaError


class ScrapePattern:
    def __init__(self, pattern: str, split: str = "train"):
        self.regex = re.compile(pattern)
        if "loss" not in self.regex.groupindex:
            raise SchemaError(f"pattern {pattern!r} lacks the required 'loss' group")
        self.split = split


class ScrapeConfig:
    def __init__(self, patterns: list[ScrapePattern]):
        self.patterns = patterns

    @classmethod
    def from_specs(cls, specs: list[tuple[str, str]]) -> "ScrapeConfig":
        return cls([ScrapePattern(p, split) for p, split in specs])


class _StepCounter:
    """Fallback step numbering when a pattern captures no step group."""

    def __init__(self):
        self.counts: dict[str, int] = {}

    def next_for(self, split: str) -> int:
        value = self.counts.get(split, 0)
        self.counts[split] = value + 1
        return value


def scrape_line(line: str, config: ScrapeConfig, counter: _StepCounter) -> dict | None:
    for pattern in config.patterns:
        match = pattern.regex.search(line)
        if not match:
            continue
        groups = match.groupdict()
        step_text = groups.get("step")
        step = int(step_text) if step_text is not None else counter.next_for(pattern.split)
        grad_text = groups.get("grad_norm")
        return {
            "step": step,
            "split": pattern.split,
            "loss": float(groups["loss"]),
            "grad_norm": float(grad_text) if grad_text is not None else None,
        }
    return None


def scrape_stdout(lines, config: ScrapeConfig):
    """Yield (event_or_None, original_line) per input line; total over streams."""
    counter = _StepCounter()
    for line in lines:
        yield scrape_line(line, config, counter), line
