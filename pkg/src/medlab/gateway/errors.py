"""Gateway error types."""


class GatewayError(Exception):
    """Base class for gateway failures."""


class SchemaViolation(GatewayError):
    """Model content still fails schema validation after the repair budget."""

    def __init__(self, message: str, errors: list[str] | None = None):
        super().__init__(message)
        self.errors = errors or []


class BudgetExhausted(GatewayError):
    """A charge would push consumption past a stage ceiling."""


class TranscriptMiss(GatewayError):
    """Replay backend has no entry for the request digest."""

    def __init__(self, digest: str):
        super().__init__(f"no transcript entry for digest {digest}")
        self.digest = digest


class ProviderError(GatewayError):
    """Transport or HTTP failure talking to a live provider."""

    def __init__(self, message: str, retries: int = 0):
        super().__init__(message)
        self.retries = retries


class DuplicateDigestConflict(GatewayError):
    """Same request digest recorded with two different responses."""

    def __init__(self, digest: str):
        super().__init__(f"digest {digest} recorded with conflicting responses")
        self.digest = digest
