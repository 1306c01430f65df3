"""Bench errors."""


class BenchError(Exception):
    pass


class MissingMetric(BenchError):
    pass


class CardinalityError(BenchError):
    pass


class MissingAsset(BenchError):
    pass


class ScoreParseFailure(BenchError):
    pass


class AnonymizationLeak(BenchError):
    def __init__(self, tokens: list[str]):
        super().__init__(f"subject still contains identifier tokens: {tokens}")
        self.tokens = tokens


class MixedRubric(BenchError):
    pass
