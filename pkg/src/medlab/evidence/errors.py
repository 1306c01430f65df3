"""Evidence module errors."""


class EvidenceError(Exception):
    pass


class TransportError(EvidenceError):
    """Search client failed after bounded retries."""


class UnmappableTask(EvidenceError):
    """Model output named a modality or task outside the closed taxonomy."""


class NoGroundedCandidate(EvidenceError):
    """Every paradigm candidate lacked code records."""


class DanglingAnchor(EvidenceError):
    """Model emitted an anchor to an unknown record after repair."""


class AbstractionLeak(EvidenceError):
    """A primitive directive still contains stop-listed source terms."""

    def __init__(self, message: str, terms: list[str] | None = None):
        super().__init__(message)
        self.terms = terms or []
