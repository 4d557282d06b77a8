"""Canonical data model shared across the pipeline.

Articles and discussion threads are the two ingested record kinds; event
records are produced by the pipeline and served by the query API. All
timestamps are timezone-aware UTC datetimes truncated to whole seconds,
serialized as ISO-8601 ``...Z`` strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

ISO_FORMAT = "%Y-%m-%dT%H:%M:%SZ"


class ParseError(ValueError):
    """A line is not valid JSON."""

    def __init__(self, message: str, line_no: int | None = None):
        super().__init__(message)
        self.line_no = line_no


class SchemaError(ValueError):
    """A record is valid JSON but violates the schema."""

    def __init__(self, message: str, field_name: str | None = None):
        super().__init__(message)
        self.field_name = field_name


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 string to an aware UTC datetime at seconds precision.

    A trailing ``Z`` is accepted; naive timestamps are taken to be UTC.
    Raises ValueError for anything unparseable.
    """
    if not isinstance(value, str):
        raise ValueError(f"timestamp must be a string, got {type(value).__name__}")
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    parsed = datetime.fromisoformat(text)
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime(ISO_FORMAT)


def dump_json(payload: dict) -> str:
    """Serialize with a fixed key order so stored bytes are reproducible."""
    return json.dumps(payload, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def _require(raw: dict, key: str) -> object:
    if key not in raw or raw[key] is None:
        raise SchemaError(f"missing required field {key!r}", field_name=key)
    return raw[key]


def _require_str(raw: dict, key: str) -> str:
    value = _require(raw, key)
    if not isinstance(value, str):
        raise SchemaError(f"field {key!r} must be a string", field_name=key)
    return value


def _require_timestamp(raw: dict, key: str) -> datetime:
    value = _require(raw, key)
    try:
        return parse_timestamp(value)
    except ValueError as exc:
        raise SchemaError(f"field {key!r} is not a valid timestamp: {exc}", field_name=key) from exc


@dataclass(frozen=True)
class Article:
    """One news item; the unit of clustering."""

    id: str
    source: str
    url: str
    title: str
    content: str
    published_at: datetime
    gold_tags: tuple[str, ...] | None = None

    def __post_init__(self):
        if not self.id:
            raise SchemaError("article id must be non-empty", field_name="id")
        if not self.title:
            raise SchemaError("article title must be non-empty", field_name="title")

    @classmethod
    def from_dict(cls, raw: dict) -> "Article":
        gold = raw.get("gold_tags")
        if gold is not None:
            if not isinstance(gold, list) or not all(isinstance(t, str) for t in gold):
                raise SchemaError("field 'gold_tags' must be a list of strings", field_name="gold_tags")
            gold = tuple(gold)
        return cls(
            id=_require_str(raw, "id"),
            source=_require_str(raw, "source"),
            url=_require_str(raw, "url"),
            title=_require_str(raw, "title"),
            content=_require_str(raw, "content"),
            published_at=_require_timestamp(raw, "published_at"),
            gold_tags=gold,
        )

    def to_dict(self) -> dict:
        out = {
            "id": self.id,
            "source": self.source,
            "url": self.url,
            "title": self.title,
            "content": self.content,
            "published_at": format_timestamp(self.published_at),
        }
        if self.gold_tags is not None:
            out["gold_tags"] = list(self.gold_tags)
        return out


@dataclass(frozen=True)
class Comment:
    author: str
    text: str
    posted_at: datetime

    def __post_init__(self):
        if not self.author:
            raise SchemaError("comment author must be non-empty", field_name="author")

    @classmethod
    def from_dict(cls, raw: dict) -> "Comment":
        return cls(
            author=_require_str(raw, "author"),
            text=_require_str(raw, "text"),
            posted_at=_require_timestamp(raw, "posted_at"),
        )

    def to_dict(self) -> dict:
        return {
            "author": self.author,
            "text": self.text,
            "posted_at": format_timestamp(self.posted_at),
        }


@dataclass(frozen=True)
class DiscussionThread:
    """A forum post plus its comments, ordered by comment timestamp."""

    id: str
    forum: str
    post_title: str
    posted_at: datetime
    comments: tuple[Comment, ...] = ()

    def __post_init__(self):
        if not self.id:
            raise SchemaError("thread id must be non-empty", field_name="id")
        # Normalize rather than reject: crawl order is not trustworthy.
        ordered = tuple(sorted(self.comments, key=lambda c: c.posted_at))
        object.__setattr__(self, "comments", ordered)

    @classmethod
    def from_dict(cls, raw: dict) -> "DiscussionThread":
        comments = raw.get("comments", [])
        if not isinstance(comments, list):
            raise SchemaError("field 'comments' must be a list", field_name="comments")
        return cls(
            id=_require_str(raw, "id"),
            forum=_require_str(raw, "forum"),
            post_title=_require_str(raw, "post_title"),
            posted_at=_require_timestamp(raw, "posted_at"),
            comments=tuple(Comment.from_dict(c) for c in comments),
        )

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "forum": self.forum,
            "post_title": self.post_title,
            "posted_at": format_timestamp(self.posted_at),
            "comments": [c.to_dict() for c in self.comments],
        }

    def commenters(self) -> frozenset[str]:
        return frozenset(c.author for c in self.comments)


METRIC_RANGES = {
    "incitement": (0.0, 1.0),
    "bias": (0.0, 1.0),
    "subjectivity": (0.0, 1.0),
    "sentiment": (-1.0, 1.0),
    "suspicion": (0.0, 1.0),
}


@dataclass(frozen=True)
class MetricScores:
    """Per-event quality metrics; every field stays in its declared range."""

    incitement: float = 0.0
    bias: float = 0.0
    subjectivity: float = 0.0
    sentiment: float = 0.0
    suspicion: float = 0.0
    popularity_articles: int = 0
    popularity_discussions: int = 0

    def __post_init__(self):
        for name, (lo, hi) in METRIC_RANGES.items():
            value = getattr(self, name)
            if not (lo <= value <= hi):
                raise ValueError(f"{name}={value} outside [{lo}, {hi}]")
        if self.popularity_articles < 0 or self.popularity_discussions < 0:
            raise ValueError("popularity counts must be non-negative")

    @classmethod
    def from_dict(cls, raw: dict) -> "MetricScores":
        return cls(**{k: raw[k] for k in cls.__dataclass_fields__ if k in raw})

    def to_dict(self) -> dict:
        return {
            "incitement": self.incitement,
            "bias": self.bias,
            "subjectivity": self.subjectivity,
            "sentiment": self.sentiment,
            "suspicion": self.suspicion,
            "popularity_articles": self.popularity_articles,
            "popularity_discussions": self.popularity_discussions,
        }


@dataclass(frozen=True)
class CommunityReport:
    """Densest qualifying user community among an event's repliers."""

    event_label: str
    users: tuple[str, ...] = ()
    density: float = 0.0
    flagged: bool = False
    bot_phrase_ratio: float = 0.0

    @classmethod
    def from_dict(cls, raw: dict) -> "CommunityReport":
        return cls(
            event_label=raw["event_label"],
            users=tuple(raw.get("users", ())),
            density=raw.get("density", 0.0),
            flagged=raw.get("flagged", False),
            bot_phrase_ratio=raw.get("bot_phrase_ratio", 0.0),
        )

    def to_dict(self) -> dict:
        return {
            "event_label": self.event_label,
            "users": list(self.users),
            "density": self.density,
            "flagged": self.flagged,
            "bot_phrase_ratio": self.bot_phrase_ratio,
        }


@dataclass(frozen=True)
class EventRecord:
    """A labeled event cluster with its derived title, tags, and metrics."""

    label: str
    title: str
    article_ids: tuple[str, ...]
    first_seen: datetime
    last_seen: datetime
    tags: tuple[tuple[str, float], ...] = ()
    metrics: MetricScores | None = None
    community: CommunityReport | None = None

    def __post_init__(self):
        if not self.article_ids:
            raise ValueError("event must contain at least one article")
        if self.last_seen < self.first_seen:
            raise ValueError("last_seen precedes first_seen")

    @classmethod
    def from_dict(cls, raw: dict) -> "EventRecord":
        metrics = raw.get("metrics")
        community = raw.get("community")
        return cls(
            label=raw["label"],
            title=raw.get("title", ""),
            article_ids=tuple(raw["article_ids"]),
            first_seen=parse_timestamp(raw["first_seen"]),
            last_seen=parse_timestamp(raw["last_seen"]),
            tags=tuple((t, s) for t, s in raw.get("tags", ())),
            metrics=MetricScores.from_dict(metrics) if metrics else None,
            community=CommunityReport.from_dict(community) if community else None,
        )

    def to_dict(self) -> dict:
        out = {
            "label": self.label,
            "title": self.title,
            "article_ids": list(self.article_ids),
            "first_seen": format_timestamp(self.first_seen),
            "last_seen": format_timestamp(self.last_seen),
            "tags": [[t, s] for t, s in self.tags],
        }
        if self.metrics is not None:
            out["metrics"] = self.metrics.to_dict()
        if self.community is not None:
            out["community"] = self.community.to_dict()
        return out
