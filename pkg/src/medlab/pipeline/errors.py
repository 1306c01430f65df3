"""Pipeline errors."""


class PipelineError(Exception):
    pass


class ModeInputError(PipelineError):
    """Task input does not match the selected interaction mode."""


class EthicsRejected(PipelineError):
    def __init__(self, reasons: list[str]):
        super().__init__("; ".join(reasons) or "ethics gate rejected the task")
        self.reasons = reasons


class StageFailure(PipelineError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


class CorruptCheckpoint(PipelineError):
    def __init__(self, stage: str, path: str):
        super().__init__(f"checkpoint for stage {stage!r} at {path} fails its digest")
        self.stage = stage
        self.path = path


class ProvenanceGap(PipelineError):
    def __init__(self, targets: list[str]):
        super().__init__(f"ledger targets do not resolve: {targets}")
        self.targets = targets
