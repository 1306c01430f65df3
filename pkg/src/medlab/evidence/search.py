"""Academic literature search clients with page-level caching.

The live client targets an OpenAlex-compatible REST surface; the fixture
client serves a local directory of JSON records for offline runs. Both
return raw page bytes so the cache can guarantee byte-identical replays.
"""

from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path
from typing import Callable, Protocol

import httpx

from .errors import TransportError
from .types import PaperRecord

PAGE_SIZE = 25


class SearchClient(Protocol):
    page_size: int

    def fetch_page(self, query: str, page: int) -> bytes:
        """Return the raw JSON bytes for one result page (1-based)."""
        ...


def parse_page(raw: bytes) -> list[PaperRecord]:
    records = json.loads(raw.decode("utf-8"))
    return [PaperRecord.model_validate(r) for r in records]


class FixtureSearchClient:
    """Serves records from a directory of JSON files, in file order.

    A record matches when every whitespace-separated query term occurs in
    its title or abstract (case-insensitive). Relevance order is the
    fixture's own ordering.
    """

    def __init__(self, index_dir: str | Path, page_size: int = PAGE_SIZE):
        self.page_size = page_size
        self.dispatches = 0
        self._records: list[dict] = []
        for path in sorted(Path(index_dir).glob("*.json")):
            loaded = json.loads(path.read_text("utf-8"))
            self._records.extend(loaded if isinstance(loaded, list) else [loaded])

    def fetch_page(self, query: str, page: int) -> bytes:
        self.dispatches += 1
        terms = [t for t in query.lower().split() if t]
        matches = []
        for record in self._records:
            haystack = (record.get("title", "") + " " + record.get("abstract", "")).lower()
            if all(term in haystack for term in terms):
                matches.append(record)
        start = (page - 1) * self.page_size
        return json.dumps(matches[start : start + self.page_size], sort_keys=True).encode("utf-8")


class LiveSearchClient:
    """OpenAlex-style works search: GET with query, page, and mailto params."""

    def __init__(
        self,
        base_url: str = "https://api.openalex.org",
        mailto: str | None = None,
        page_size: int = PAGE_SIZE,
        transport: Callable[[str, dict], tuple[int, dict]] | None = None,
        max_retries: int = 3,
        rate_limit_wait_cap_s: float = 30.0,
    ):
        self.base_url = base_url.rstrip("/")
        self.mailto = mailto
        self.page_size = page_size
        self.max_retries = max_retries
        self.rate_limit_wait_cap_s = rate_limit_wait_cap_s
        self._transport = transport or self._default_transport

    @staticmethod
    def _default_transport(url: str, params: dict) -> tuple[int, dict]:
        response = httpx.get(url, params=params, timeout=30.0)
        return response.status_code, response.json()

    def fetch_page(self, query: str, page: int) -> bytes:
        params = {"search": query, "per-page": self.page_size, "page": page}
        if self.mailto:
            params["mailto"] = self.mailto
        url = f"{self.base_url}/works"

        waited = 0.0
        last_error: str | None = None
        for attempt in range(self.max_retries + 1):
            try:
                status, payload = self._transport(url, params)
            except Exception as exc:
                last_error = str(exc)
                continue
            if status == 429:
                # rate limiting surfaces as a delayed retry, not a failure,
                # until the wall-clock cap is hit
                delay = min(2.0 ** attempt, self.rate_limit_wait_cap_s - waited)
                if delay <= 0:
                    raise TransportError("rate-limited past the wall-clock cap")
                time.sleep(delay)
                waited += delay
                continue
            if status != 200:
                last_error = f"HTTP {status}"
                continue
            records = [self._map_work(w) for w in payload.get("results", [])]
            return json.dumps(records, sort_keys=True).encode("utf-8")
        raise TransportError(f"search failed after {self.max_retries + 1} attempts: {last_error}")

    @staticmethod
    def _map_work(work: dict) -> dict:
        abstract = ""
        inverted = work.get("abstract_inverted_index")
        if inverted:
            positions = [(p, word) for word, plist in inverted.items() for p in plist]
            abstract = " ".join(word for _, word in sorted(positions))
        venue = ""
        location = work.get("primary_location") or {}
        source = location.get("source") or {}
        if source:
            venue = source.get("display_name") or ""
        return {
            "record_id": str(work.get("id", "")).replace("https://openalex.org/", ""),
            "title": work.get("title") or "",
            "year": int(work.get("publication_year") or 1950),
            "venue": venue,
            "citation_count": int(work.get("cited_by_count") or 0),
            "abstract": abstract,
            "source_url": str(work.get("id", "")),
        }


class CachingSearchClient:
    """Disk cache keyed by (query, page); cached bytes are served verbatim."""

    def __init__(self, inner: SearchClient, cache_dir: str | Path):
        self._inner = inner
        self.page_size = inner.page_size
        self._dir = Path(cache_dir)
        self._dir.mkdir(parents=True, exist_ok=True)

    def _key_path(self, query: str, page: int) -> Path:
        key = hashlib.sha256(f"{query}\x00{page}".encode("utf-8")).hexdigest()
        return self._dir / f"{key}.json"

    def fetch_page(self, query: str, page: int) -> bytes:
        path = self._key_path(query, page)
        if path.exists():
            return path.read_bytes()
        raw = self._inner.fetch_page(query, page)
        path.write_bytes(raw)
        return raw


def search_literature(
    query: str,
    client: SearchClient,
    page_limit: int,
    sort_by_citations: bool = False,
) -> list[PaperRecord]:
    """Fetch up to page_limit pages, deduplicated by record_id.

    Ordering is the client's relevance order; an explicit citation sort
    is the only re-ranking offered.
    """
    if not query.strip():
        raise ValueError("query must be non-empty")
    if page_limit < 1:
        raise ValueError("page_limit must be >= 1")
    seen: set[str] = set()
    results: list[PaperRecord] = []
    for page in range(1, page_limit + 1):
        records = parse_page(client.fetch_page(query, page))
        for record in records:
            if record.record_id in seen:
                continue
            seen.add(record.record_id)
            results.append(record)
        if len(records) < client.page_size:
            break
    if sort_by_citations:
        results.sort(key=lambda r: (-r.citation_count, r.record_id))
    return results
