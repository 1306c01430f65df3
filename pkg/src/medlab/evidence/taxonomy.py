"""The closed modality/task taxonomy: 6 modalities, 19 tasks."""

from __future__ import annotations

import json
from functools import lru_cache
from .._data import read_data_text


@lru_cache(maxsize=1)
def load_taxonomy() -> dict[str, list[str]]:
    text = read_data_text("taxonomy.json")
    return json.loads(text)["modalities"]


def modalities() -> list[str]:
    return list(load_taxonomy().keys())


def tasks() -> list[str]:
    return [task for group in load_taxonomy().values() for task in group]


def tasks_for(modality: str) -> list[str]:
    return list(load_taxonomy().get(modality, []))


def is_valid_modality(modality: str) -> bool:
    return modality in load_taxonomy()


def is_valid_task(task_id: str) -> bool:
    return task_id in set(tasks())


def modality_of_task(task_id: str) -> str | None:
    for modality, group in load_taxonomy().items():
        if task_id in group:
            return modality
    return None
