"""Weights-manifest writer: (path, bytes, sha256) per registered file."""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

from .emitter import default_workspace
from .errors import MissingWeightFile

MANIFEST_RELPATH = Path("logs") / "weights_manifest.json"


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(
    weight_paths: list[str | Path],
    workspace_dir: str | Path | None = None,
    final_metrics: dict[str, float] | None = None,
) -> Path:
    """Write the manifest; paths are recorded relative to the workspace."""
    workspace = Path(workspace_dir) if workspace_dir else default_workspace()
    entries = []
    for raw in weight_paths:
        path = Path(raw)
        if not path.is_absolute():
            path = workspace / path
        if not path.is_file():
            raise MissingWeightFile(f"weight file not found: {path}")
        try:
            rel = path.resolve().relative_to(workspace.resolve())
        except ValueError:
            rel = path
        entries.append(
            {
                "path": rel.as_posix(),
                "bytes": path.stat().st_size,
                "sha256": _sha256(path),
            }
        )
    entries.sort(key=lambda e: e["path"])
    manifest = {
        "weights": entries,
        "final_metrics": {k: float(v) for k, v in (final_metrics or {}).items()},
    }
    out_path = workspace / MANIFEST_RELPATH
    out_path.parent.mkdir(parents=True, exist_ok=True)
    tmp_path = out_path.with_suffix(".json.tmp")
    with open(tmp_path, "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, sort_keys=True, indent=2)
        handle.flush()
        os.fsync(handle.fileno())
    tmp_path.replace(out_path)
    return out_path
