"""Stop-list extraction for domain-term abstraction checks.

A reference's stop-list holds the domain-specific terms the surveyed
directives must not carry: content words that recur in the source
abstract (>= 2 occurrences) and are absent from the shipped
general-English/research frequency list.
"""

from __future__ import annotations

import re
from collections import Counter
from functools import lru_cache
from .._data import read_data_text

_TOKEN_RE = re.compile(r"[a-zA-Z][a-zA-Z\-]{3,}")
MIN_OCCURRENCES = 2


@lru_cache(maxsize=1)
def common_words() -> frozenset[str]:
    text = read_data_text("common_words.txt")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


def build_stoplist(abstract: str) -> set[str]:
    counts = Counter(t.lower() for t in _TOKEN_RE.findall(abstract))
    general = common_words()
    return {
        term
        for term, n in counts.items()
        if n >= MIN_OCCURRENCES and term not in general
    }


def find_leaks(text: str, stoplist: set[str]) -> list[str]:
    """Stop-listed terms present in text, whole-word and case-insensitive."""
    leaks = []
    lowered = text.lower()
    for term in sorted(stoplist):
        if re.search(rf"(?<![a-zA-Z]){re.escape(term)}(?![a-zA-Z])", lowered):
            leaks.append(term)
    return leaks
