"""Medical toolbox registry and environment-manifest merging."""

from __future__ import annotations

import json
from functools import lru_cache

from pydantic import BaseModel

from .._data import read_data_text
from .errors import ConflictingConstraint, UnknownToolbox
from .types import PackagePin


class Toolbox(BaseModel):
    toolbox_id: str
    modalities: list[str]
    dependencies: list[PackagePin]


@lru_cache(maxsize=1)
def registry() -> dict[str, Toolbox]:
    payload = json.loads(read_data_text("toolboxes.json"))
    return {t["toolbox_id"]: Toolbox.model_validate(t) for t in payload["toolboxes"]}


def toolboxes_for_modality(modality: str) -> list[Toolbox]:
    return [t for t in registry().values() if modality in t.modalities]


def get_toolbox(toolbox_id: str) -> Toolbox:
    box = registry().get(toolbox_id)
    if box is None:
        raise UnknownToolbox(f"toolbox {toolbox_id!r} is not registered")
    return box


def _parse_version(text: str) -> tuple[int, ...]:
    return tuple(int(p) for p in text.split(".") if p.isdigit())


def _parse_constraint(constraint: str):
    """Parse a constraint into (exact, lower, upper) bounds; '' means unconstrained."""
    exact = None
    lower = None
    upper = None
    for clause in filter(None, (c.strip() for c in constraint.split(","))):
        if clause.startswith("=="):
            exact = _parse_version(clause[2:])
        elif clause.startswith(">="):
            lower = _parse_version(clause[2:])
        elif clause.startswith("<="):
            upper = (_parse_version(clause[2:]), True)
        elif clause.startswith("<"):
            upper = (_parse_version(clause[1:]), False)
        elif clause.startswith(">"):
            lower = _parse_version(clause[1:]) + (1,)
        else:
            exact = _parse_version(clause)
    return exact, lower, upper


def _compatible(a: str, b: str) -> bool:
    if not a or not b or a == b:
        return True
    exact_a, lower_a, upper_a = _parse_constraint(a)
    exact_b, lower_b, upper_b = _parse_constraint(b)
    if exact_a is not None and exact_b is not None:
        return exact_a == exact_b
    for exact, (lower, upper) in (
        (exact_a, (lower_b, upper_b)),
        (exact_b, (lower_a, upper_a)),
    ):
        if exact is not None:
            if lower is not None and exact < lower:
                return False
            if upper is not None:
                bound, inclusive = upper
                if exact > bound or (exact == bound and not inclusive):
                    return False
            return True
    # two ranges: empty intersection means conflict
    lower = max(filter(None, (lower_a, lower_b)), default=None)
    uppers = [u for u in (upper_a, upper_b) if u is not None]
    if lower is not None and uppers:
        bound, inclusive = min(uppers)
        if lower > bound or (lower == bound and not inclusive):
            return False
    return True


def merge_manifests(pins_groups: list[list[PackagePin]]) -> list[PackagePin]:
    """Merge dependency lists; incompatible pins for one package are reported."""
    merged: dict[str, PackagePin] = {}
    for pins in pins_groups:
        for pin in pins:
            existing = merged.get(pin.package)
            if existing is None:
                merged[pin.package] = pin
                continue
            if not _compatible(existing.constraint, pin.constraint):
                raise ConflictingConstraint(
                    f"package {pin.package!r}: {existing.constraint!r} conflicts with "
                    f"{pin.constraint!r}"
                )
            # keep the stricter-looking pin: exact wins over range
            if pin.constraint.startswith("==") and not existing.constraint.startswith("=="):
                merged[pin.package] = pin
    return sorted(merged.values(), key=lambda p: p.package)
