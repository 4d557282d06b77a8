"""newslens: news-event clustering, scoring, and discussion analysis.

Library layout mirrors the pipeline: `ingest` parses feeds into `records`,
`vectorize` + `cluster` turn articles into labeled events, `titling` names
and tags them, `metrics` and `opinion` score them, `store` persists them,
and `api`/`cli` expose the results.
"""

from .records import (
    Article,
    Comment,
    CommunityReport,
    DiscussionThread,
    EventRecord,
    MetricScores,
    ParseError,
    SchemaError,
)

__all__ = [
    "Article",
    "Comment",
    "CommunityReport",
    "DiscussionThread",
    "EventRecord",
    "MetricScores",
    "ParseError",
    "SchemaError",
]

__version__ = "0.1.0"
