"""Ingestion of article and discussion records from JSONL files or polled feeds.

One JSON object per line. Bad lines are rejected individually and reported
by 1-based line number; good lines are persisted through the store, which
skips duplicates by id (first writer wins), so re-ingesting a file is safe.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator

from .records import Article, DiscussionThread, ParseError

ARTICLES = "articles"
DISCUSSIONS = "discussions"


@dataclass
class IngestResult:
    accepted: int = 0
    rejected_lines: list[int] = field(default_factory=list)

    def merge(self, other: "IngestResult") -> None:
        self.accepted += other.accepted
        self.rejected_lines.extend(other.rejected_lines)


def parse_article_record(line: str, line_no: int | None = None) -> Article:
    """Parse one JSONL line into a validated Article.

    Raises ParseError for malformed JSON (carrying the line number) and
    SchemaError for missing/invalid fields.
    """
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {line_no}: malformed JSON: {exc}", line_no=line_no) from exc
    if not isinstance(raw, dict):
        raise ParseError(f"line {line_no}: expected a JSON object", line_no=line_no)
    return Article.from_dict(raw)


def parse_discussion_record(line: str, line_no: int | None = None) -> DiscussionThread:
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {line_no}: malformed JSON: {exc}", line_no=line_no) from exc
    if not isinstance(raw, dict):
        raise ParseError(f"line {line_no}: expected a JSON object", line_no=line_no)
    return DiscussionThread.from_dict(raw)


def _iter_lines(path: Path) -> Iterator[tuple[int, str]]:
    with path.open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if line.strip():
                yield line_no, line


def ingest_batch(store, path: str | Path, kind: str) -> IngestResult:
    """Ingest one JSONL file; returns accepted count and rejected line numbers.

    ``accepted`` counts records newly persisted; duplicates of already-stored
    ids are skipped silently (idempotent re-ingest). An unreadable path raises
    OSError; a file where every line is rejected is not an error.
    """
    if kind not in (ARTICLES, DISCUSSIONS):
        raise ValueError(f"kind must be {ARTICLES!r} or {DISCUSSIONS!r}, got {kind!r}")
    path = Path(path)
    result = IngestResult()
    for line_no, line in _iter_lines(path):
        try:
            if kind == ARTICLES:
                record = parse_article_record(line, line_no)
                inserted = store.add_article(record)
            else:
                record = parse_discussion_record(line, line_no)
                inserted = store.add_thread(record)
        except ValueError:
            result.rejected_lines.append(line_no)
            continue
        if inserted:
            result.accepted += 1
    return result


def read_articles(path: str | Path) -> tuple[list[Article], list[int]]:
    """Parse an article JSONL file without touching a store."""
    articles: list[Article] = []
    rejected: list[int] = []
    for line_no, line in _iter_lines(Path(path)):
        try:
            articles.append(parse_article_record(line, line_no))
        except ValueError:
            rejected.append(line_no)
    return articles, rejected


class DirectoryFeed:
    """Default fetcher: polls a directory for JSONL files, sorted by filename.

    Each poll yields only files not seen by this feed instance, so a polling
    loop picks up exactly the newly dropped files.
    """

    def __init__(self, root: str | Path, pattern: str = "*.jsonl"):
        self.root = Path(root)
        self.pattern = pattern
        self._seen: set[Path] = set()

    def poll(self) -> list[Path]:
        if not self.root.is_dir():
            raise FileNotFoundError(f"feed directory not found: {self.root}")
        fresh = [p for p in sorted(self.root.glob(self.pattern)) if p not in self._seen]
        self._seen.update(fresh)
        return fresh


def ingest_feed(store, fetcher, kind: str) -> IngestResult:
    """Drain one poll of a fetcher (anything with ``poll() -> iterable of paths``)."""
    total = IngestResult()
    for path in fetcher.poll():
        total.merge(ingest_batch(store, path, kind))
    return total
