"""Pipeline orchestration: modes, checkpoints, ethics gate, provenance."""

from .config import ModeConfig
from .errors import (
    CorruptCheckpoint,
    EthicsRejected,
    ModeInputError,
    PipelineError,
    ProvenanceGap,
    StageFailure,
)
from .gate import GatePolicy, GateResult, gate_ethics, load_default_policy
from .ledger import LedgerEntry, ProvenanceLedger
from .modes import (
    ArtifactBundle,
    MODES,
    build_gateway,
    derive_run_id,
    derive_task_representation,
    run_mode,
    validate_mode_input,
)
from .state import (
    Checkpoint,
    RunState,
    STAGE_SEQUENCES,
    checkpoint,
    resume,
    save_state,
)

__all__ = [
    "ArtifactBundle",
    "Checkpoint",
    "CorruptCheckpoint",
    "EthicsRejected",
    "GatePolicy",
    "GateResult",
    "LedgerEntry",
    "MODES",
    "ModeConfig",
    "ModeInputError",
    "PipelineError",
    "ProvenanceGap",
    "ProvenanceLedger",
    "RunState",
    "STAGE_SEQUENCES",
    "StageFailure",
    "build_gateway",
    "checkpoint",
    "derive_run_id",
    "derive_task_representation",
    "gate_ethics",
    "load_default_policy",
    "resume",
    "run_mode",
    "save_state",
    "validate_mode_input",
]
