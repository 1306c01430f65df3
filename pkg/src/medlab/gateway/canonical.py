"""Canonical serialization and request digests.

Digests must agree across processes and field insertion orders, so the
canonical form is UTF-8 JSON with sorted keys and no insignificant
whitespace.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any


def canonical_json(value: Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_digest(value: Any) -> str:
    return hashlib.sha256(canonical_json(value).encode("utf-8")).hexdigest()
