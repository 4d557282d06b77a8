"""Append-only store for articles, discussions, and event records.

One JSONL log per store directory; every line is a versioned envelope and
the whole state is replayed into memory on open. The pipeline is the only
writer; API readers work from immutable snapshots so a write never blocks
them beyond the snapshot swap.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path
from typing import Mapping

from .records import (
    Article,
    DiscussionThread,
    EventRecord,
    MetricScores,
    dump_json,
    format_timestamp,
)
from .titling import normalize_tag

log = logging.getLogger(__name__)

LOG_NAME = "store.log"

GROUP_EVENTS = "events"
GROUP_MEDIA = "media"
GROUP_OPINION = "opinion"
GROUP_CHOICES = (GROUP_EVENTS, GROUP_MEDIA, GROUP_OPINION)

METRIC_NAMES = tuple(MetricScores.__dataclass_fields__)


@dataclass(frozen=True)
class TimeSeriesPoint:
    bucket_start: datetime
    scope: str
    metric: str
    value: float

    def to_dict(self) -> dict:
        return {
            "bucket_start": format_timestamp(self.bucket_start),
            "scope": self.scope,
            "metric": self.metric,
            "value": self.value,
        }


@dataclass(frozen=True)
class GroupRow:
    """One pivot row for group_by=media."""

    key: str
    event_count: int
    article_count: int
    mean_metrics: Mapping[str, float]

    def to_dict(self) -> dict:
        return {
            "key": self.key,
            "event_count": self.event_count,
            "article_count": self.article_count,
            "mean_metrics": dict(self.mean_metrics),
        }


@dataclass(frozen=True)
class QueryPage:
    items: tuple
    total: int
    limit: int
    offset: int

    def to_dict(self) -> dict:
        return {
            "items": [item.to_dict() for item in self.items],
            "total": self.total,
            "limit": self.limit,
            "offset": self.offset,
        }


@dataclass(frozen=True)
class StoreSnapshot:
    """Immutable view of the store at one revision."""

    articles: Mapping[str, Article]
    threads: Mapping[str, DiscussionThread]
    events: Mapping[str, EventRecord]
    revision: int


_KINDS = {"article", "thread", "event", "run"}


class Store:
    """Single-writer store over one append-only JSONL log."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._path = self.root / LOG_NAME
        self._lock = threading.Lock()
        self._articles: dict[str, Article] = {}
        self._threads: dict[str, DiscussionThread] = {}
        self._events: dict[str, EventRecord] = {}
        self._runs: list[dict] = []
        self._revision = 0
        self._snapshot: StoreSnapshot | None = None
        self._trim_torn_tail()
        self._replay()
        self._file = self._path.open("a", encoding="utf-8")

    # -- lifecycle ---------------------------------------------------------

    def _trim_torn_tail(self) -> None:
        """Drop a partial trailing line left by a crash mid-write.

        Without this, the next append would glue onto the torn line and a
        committed record would become unreadable on a later open.
        """
        if not self._path.exists():
            return
        size = self._path.stat().st_size
        if size == 0:
            return
        with self._path.open("rb+") as handle:
            handle.seek(size - 1)
            if handle.read(1) == b"\n":
                return
            cut = 0
            pos = size
            while pos > 0:
                step = min(4096, pos)
                handle.seek(pos - step)
                newline = handle.read(step).rfind(b"\n")
                if newline != -1:
                    cut = pos - step + newline + 1
                    break
                pos -= step
            handle.truncate(cut)
        log.warning("dropped torn trailing bytes from %s (kept %d bytes)", self._path, cut)

    def _replay(self) -> None:
        if not self._path.exists():
            return
        with self._path.open("r", encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    envelope = json.loads(line)
                    self._apply(envelope)
                except (json.JSONDecodeError, KeyError, ValueError) as exc:
                    # Torn tails are trimmed before replay; a complete line
                    # that still fails to parse is skipped, not fatal.
                    log.warning("skipping unreadable store line %d: %s", line_no, exc)

    def _apply(self, envelope: dict) -> None:
        kind = envelope["kind"]
        if kind not in _KINDS:
            raise ValueError(f"unknown record kind {kind!r}")
        data = envelope["data"]
        if kind == "article":
            record = Article.from_dict(data)
            self._articles[record.id] = record
        elif kind == "thread":
            record = DiscussionThread.from_dict(data)
            self._threads[record.id] = record
        elif kind == "event":
            record = EventRecord.from_dict(data)
            self._events[record.label] = record
        else:
            self._runs.append(data)
        self._revision = max(self._revision, int(envelope["rev"]))

    def close(self) -> None:
        with self._lock:
            self._file.close()

    def __enter__(self) -> "Store":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- writes ------------------------------------------------------------

    def _append(self, kind: str, data: dict) -> int:
        self._revision += 1
        envelope = {"kind": kind, "rev": self._revision, "data": data}
        self._file.write(dump_json(envelope) + "\n")
        self._file.flush()
        self._snapshot = None
        return self._revision

    def add_article(self, article: Article) -> bool:
        """Insert; a duplicate id is ignored so ingest can re-run."""
        with self._lock:
            if article.id in self._articles:
                return False
            self._articles[article.id] = article
            self._append("article", article.to_dict())
            return True

    def add_thread(self, thread: DiscussionThread) -> bool:
        with self._lock:
            if thread.id in self._threads:
                return False
            self._threads[thread.id] = thread
            self._append("thread", thread.to_dict())
            return True

    def upsert_event(self, record: EventRecord) -> int:
        """Replace any prior record for the label; returns the new revision."""
        with self._lock:
            self._events[record.label] = record
            return self._append("event", record.to_dict())

    def add_run(self, command: str, seed: int | None, config_path: str | None) -> int:
        entry = {
            "command": command,
            "seed": seed,
            "config_path": config_path,
            "at": format_timestamp(datetime.now().astimezone()),
        }
        with self._lock:
            self._runs.append(entry)
            return self._append("run", entry)

    # -- reads -------------------------------------------------------------

    def snapshot(self) -> StoreSnapshot:
        with self._lock:
            if self._snapshot is None:
                self._snapshot = StoreSnapshot(
                    articles=dict(self._articles),
                    threads=dict(self._threads),
                    events=dict(self._events),
                    revision=self._revision,
                )
            return self._snapshot

    @property
    def revision(self) -> int:
        with self._lock:
            return self._revision

    def get_event(self, label: str) -> EventRecord | None:
        return self.snapshot().events.get(label)

    def articles(self) -> list[Article]:
        return sorted(self.snapshot().articles.values(), key=lambda a: (a.published_at, a.id))

    def threads(self) -> list[DiscussionThread]:
        return sorted(self.snapshot().threads.values(), key=lambda t: (t.posted_at, t.id))

    def runs(self) -> list[dict]:
        with self._lock:
            return list(self._runs)

    def query_events(self, *, time_from: datetime, time_to: datetime, keyword: str | None = None,
                     group_by: str = GROUP_EVENTS, limit: int = 50, offset: int = 0) -> QueryPage:
        return query_events(self.snapshot(), time_from=time_from, time_to=time_to,
                            keyword=keyword, group_by=group_by, limit=limit, offset=offset)

    def metrics_timeseries(self, *, scope: str | None, metric: str, time_from: datetime,
                           time_to: datetime, bucket: timedelta) -> list[TimeSeriesPoint]:
        return metrics_timeseries(self.snapshot(), scope=scope, metric=metric,
                                  time_from=time_from, time_to=time_to, bucket=bucket)

    def trending_tags(self, *, time_from: datetime, time_to: datetime, k: int) -> list[tuple[str, int]]:
        return trending_tags(self.snapshot(), time_from=time_from, time_to=time_to, k=k)


# -- pure query layer (works on snapshots, easy to test) --------------------


def _overlapping(snapshot: StoreSnapshot, time_from: datetime, time_to: datetime) -> list[EventRecord]:
    return [
        event for event in snapshot.events.values()
        if event.first_seen <= time_to and event.last_seen >= time_from
    ]


def _tag_terms(event: EventRecord) -> list[str]:
    return [term for term, _score in event.tags]


def _keyword_match(event: EventRecord, needle: str) -> bool:
    if needle in normalize_tag(event.title):
        return True
    return any(needle in normalize_tag(term) for term in _tag_terms(event))


def _paginate(rows: list, limit: int, offset: int) -> QueryPage:
    if limit < 0 or offset < 0:
        raise ValueError("limit and offset must be non-negative")
    return QueryPage(items=tuple(rows[offset:offset + limit]), total=len(rows), limit=limit, offset=offset)


def query_events(snapshot: StoreSnapshot, *, time_from: datetime, time_to: datetime,
                 keyword: str | None = None, group_by: str = GROUP_EVENTS,
                 limit: int = 50, offset: int = 0) -> QueryPage:
    """Events overlapping the span, filtered and ordered per grouping mode."""
    if time_from > time_to:
        raise ValueError("time_from must not exceed time_to")
    if group_by not in GROUP_CHOICES:
        raise ValueError(f"group_by must be one of {GROUP_CHOICES}")
    matched = _overlapping(snapshot, time_from, time_to)
    if keyword:
        needle = normalize_tag(keyword)
        matched = [e for e in matched if _keyword_match(e, needle)]

    if group_by == GROUP_MEDIA:
        return _paginate(_pivot_by_media(snapshot, matched), limit, offset)
    if group_by == GROUP_OPINION:
        matched.sort(key=lambda e: (
            -(e.metrics.popularity_discussions if e.metrics else 0),
            not (e.community.flagged if e.community else False),
            e.label,
        ))
        return _paginate(matched, limit, offset)
    matched.sort(key=lambda e: e.label)  # newest first, stable label tie-break
    matched.sort(key=lambda e: e.last_seen, reverse=True)
    return _paginate(matched, limit, offset)


def _pivot_by_media(snapshot: StoreSnapshot, events: list[EventRecord]) -> list[GroupRow]:
    per_source_articles: dict[str, int] = {}
    per_source_events: dict[str, set[str]] = {}
    for event in events:
        for article_id in event.article_ids:
            article = snapshot.articles.get(article_id)
            # Dangling ids (article log lost) still count somewhere.
            source = article.source if article else "unknown"
            per_source_articles[source] = per_source_articles.get(source, 0) + 1
            per_source_events.setdefault(source, set()).add(event.label)
    rows = []
    for source in sorted(per_source_articles):
        labels = per_source_events[source]
        members = [snapshot.events[label] for label in sorted(labels)]
        scored = [e.metrics for e in members if e.metrics is not None]
        means = {
            name: (sum(getattr(m, name) for m in scored) / len(scored)) if scored else 0.0
            for name in METRIC_NAMES
        }
        rows.append(GroupRow(
            key=source,
            event_count=len(members),
            article_count=per_source_articles[source],
            mean_metrics=means,
        ))
    rows.sort(key=lambda r: (-r.article_count, r.key))
    return rows


def _bucket_floor(moment: datetime, bucket: timedelta) -> datetime:
    epoch = datetime(1970, 1, 1, tzinfo=moment.tzinfo)
    step = int(bucket.total_seconds())
    offset = int((moment - epoch).total_seconds())
    return epoch + timedelta(seconds=(offset // step) * step)


def metrics_timeseries(snapshot: StoreSnapshot, *, scope: str | None, metric: str,
                       time_from: datetime, time_to: datetime,
                       bucket: timedelta) -> list[TimeSeriesPoint]:
    """Per-bucket mean of one metric over events active in the bucket.

    Scope may be an event label, a source name, or None for everything;
    buckets are anchored to the epoch grid and empty ones are omitted.
    """
    if metric not in METRIC_NAMES:
        raise ValueError(f"unknown metric {metric!r}")
    if bucket <= timedelta(0):
        raise ValueError("bucket must be positive")
    if time_from > time_to:
        raise ValueError("time_from must not exceed time_to")

    events = list(snapshot.events.values())
    if scope:
        if scope in snapshot.events:
            events = [snapshot.events[scope]]
        else:
            events = [
                event for event in events
                if any(
                    (a := snapshot.articles.get(article_id)) and a.source == scope
                    for article_id in event.article_ids
                )
            ]

    scored = [e for e in events if e.metrics is not None]
    if not scored:
        return []
    # Buckets outside the events' activity span are empty and omitted, so
    # clamp the scan to it; open-ended queries stay cheap.
    clamped_from = max(time_from, _bucket_floor(min(e.first_seen for e in scored), bucket))
    clamped_to = min(time_to, max(e.last_seen for e in scored))

    points = []
    start = _bucket_floor(clamped_from, bucket)
    label = scope or "all"
    while start <= clamped_to:
        end = start + bucket
        active = [
            e.metrics for e in scored
            if e.first_seen < end and e.last_seen >= start
        ]
        if active:
            value = sum(getattr(m, metric) for m in active) / len(active)
            points.append(TimeSeriesPoint(bucket_start=start, scope=label, metric=metric, value=value))
        start = end
    return points


def trending_tags(snapshot: StoreSnapshot, *, time_from: datetime, time_to: datetime,
                  k: int) -> list[tuple[str, int]]:
    """Top-k tags by distinct events carrying them in the span."""
    if k < 1:
        raise ValueError("k must be >= 1")
    counts: dict[str, int] = {}
    for event in _overlapping(snapshot, time_from, time_to):
        for term in set(_tag_terms(event)):
            counts[term] = counts.get(term, 0) + 1
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:k]
