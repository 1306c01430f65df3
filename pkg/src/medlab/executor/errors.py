"""Executor errors."""

from .types import RunRecord, Verdict


class ExecutorError(Exception):
    pass


class UnknownToolbox(ExecutorError):
    pass


class ConflictingConstraint(ExecutorError):
    """Two toolboxes pin incompatible versions; reported, not silently resolved."""


class DataflowViolation(ExecutorError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class SandboxUnavailable(ExecutorError):
    pass


class RoundsExhausted(ExecutorError):
    """Repair loop spent its rounds; carries the last record and verdict."""

    def __init__(self, record: RunRecord, verdict: Verdict, rounds_used: int):
        super().__init__(f"repair exhausted after {rounds_used} rounds: {verdict.feedback}")
        self.record = record
        self.verdict = verdict
        self.rounds_used = rounds_used


class NoValidatedRun(ExecutorError):
    pass
