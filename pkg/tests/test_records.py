"""Data-model parsing, validation, and serialization."""

import json
from datetime import datetime, timezone

import pytest

from newslens.records import (
    Article,
    Comment,
    CommunityReport,
    DiscussionThread,
    EventRecord,
    MetricScores,
    SchemaError,
    dump_json,
    format_timestamp,
    parse_timestamp,
)

from helpers import T0, make_article, make_comment, make_thread

ARTICLE_LINE = {
    "id": "a1",
    "source": "s",
    "url": "u",
    "title": "T",
    "content": "C",
    "published_at": "2021-05-01T00:00:00Z",
}


def test_article_from_dict_maps_fields():
    article = Article.from_dict(ARTICLE_LINE)
    assert article.id == "a1"
    assert article.source == "s"
    assert article.title == "T"
    assert article.published_at == datetime(2021, 5, 1, tzinfo=timezone.utc)


def test_missing_title_names_the_field():
    raw = {k: v for k, v in ARTICLE_LINE.items() if k != "title"}
    with pytest.raises(SchemaError) as err:
        Article.from_dict(raw)
    assert err.value.field_name == "title"


def test_unparseable_timestamp_is_schema_error():
    raw = dict(ARTICLE_LINE, published_at="yesterday")
    with pytest.raises(SchemaError) as err:
        Article.from_dict(raw)
    assert err.value.field_name == "published_at"


def test_gold_tags_must_be_strings():
    raw = dict(ARTICLE_LINE, gold_tags=["ok", 3])
    with pytest.raises(SchemaError):
        Article.from_dict(raw)


@pytest.mark.parametrize("value,expected", [
    ("2021-05-01T00:00:00Z", datetime(2021, 5, 1, tzinfo=timezone.utc)),
    ("2021-05-01T02:00:00+02:00", datetime(2021, 5, 1, tzinfo=timezone.utc)),
    ("2021-05-01T00:00:00", datetime(2021, 5, 1, tzinfo=timezone.utc)),
    ("2021-05-01T00:00:00.750Z", datetime(2021, 5, 1, tzinfo=timezone.utc)),
])
def test_timestamps_normalize_to_utc_seconds(value, expected):
    assert parse_timestamp(value) == expected


def test_timestamp_format_round_trips():
    text = "2021-05-01T12:34:56Z"
    assert format_timestamp(parse_timestamp(text)) == text


def test_article_round_trips():
    article = Article.from_dict(dict(ARTICLE_LINE, gold_tags=["x", "y"]))
    assert Article.from_dict(article.to_dict()) == article


def test_thread_orders_comments_by_time():
    thread = make_thread("t1", comments=(
        make_comment("bob", minutes=30),
        make_comment("ann", minutes=10),
    ))
    assert [c.author for c in thread.comments] == ["ann", "bob"]
    assert thread.commenters() == frozenset({"ann", "bob"})


def test_thread_round_trips():
    thread = make_thread("t1", authors=("ann", "bob"))
    assert DiscussionThread.from_dict(thread.to_dict()) == thread


def test_empty_comment_author_rejected():
    with pytest.raises(SchemaError):
        Comment(author="", text="x", posted_at=T0)


def test_metric_ranges_enforced():
    MetricScores(incitement=1.0, sentiment=-1.0)
    with pytest.raises(ValueError):
        MetricScores(incitement=1.5)
    with pytest.raises(ValueError):
        MetricScores(sentiment=-1.01)
    with pytest.raises(ValueError):
        MetricScores(popularity_articles=-1)


def test_event_record_validation_and_round_trip():
    record = EventRecord(
        label="ev-000001",
        title="quick brown fox",
        article_ids=("a1", "a2"),
        first_seen=T0,
        last_seen=T0,
        tags=(("fox", 0.8), ("brown", 0.5)),
        metrics=MetricScores(suspicion=0.25, popularity_discussions=3),
        community=CommunityReport(event_label="ev-000001", users=("u1",), density=1.0),
    )
    parsed = EventRecord.from_dict(json.loads(dump_json(record.to_dict())))
    assert parsed == record

    with pytest.raises(ValueError):
        EventRecord(label="e", title="t", article_ids=(), first_seen=T0, last_seen=T0)


def test_dump_json_is_canonical():
    assert dump_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'
    assert dump_json({"cjk": "新聞"}) == '{"cjk":"新聞"}'
