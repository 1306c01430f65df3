"""Workspace assembly: codebases, toolboxes, mounts, environment manifest."""

from __future__ import annotations

from ..evidence.types import EvidenceBase
from ..ideation.types import ResearchPlan
from . import toolbox as toolbox_registry
from .types import DatasetMount, WorkspaceSpec

DEFAULT_DATA_MOUNT = DatasetMount(host_path="data", sandbox_path="/workspace/data", read_only=True)


def investigate_workspace(plan: ResearchPlan, base: EvidenceBase) -> WorkspaceSpec:
    """Select toolboxes by task modality and merge their dependency manifests."""
    boxes = toolbox_registry.toolboxes_for_modality(base.task.modality)
    manifest = toolbox_registry.merge_manifests([b.dependencies for b in boxes])
    codes = list(base.codes)
    return WorkspaceSpec(
        codebase_refs=codes,
        toolbox_ids=[b.toolbox_id for b in boxes],
        dataset_mounts=[DEFAULT_DATA_MOUNT],
        environment_manifest=manifest,
        scaffold=not codes,
    )
