"""Feed parsing and idempotent batch ingestion."""

import pytest

from newslens.ingest import (
    DirectoryFeed,
    ingest_batch,
    parse_article_record,
    read_articles,
)
from newslens.records import ParseError, SchemaError, dump_json
from newslens.store import Store

from helpers import make_article


def _article_line(i: int) -> str:
    return dump_json(make_article(f"a{i}", hours=float(i)).to_dict())


def _write_articles(path, count, mangle=()):
    lines = []
    for i in range(1, count + 1):
        lines.append("{not json" if i in mangle else _article_line(i))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def test_parse_article_record_reports_line_number():
    with pytest.raises(ParseError) as err:
        parse_article_record("{oops", line_no=17)
    assert err.value.line_no == 17


def test_parse_article_schema_error_names_field():
    with pytest.raises(SchemaError) as err:
        parse_article_record('{"id":"a","source":"s","url":"u","content":"c","published_at":"2021-05-01T00:00:00Z"}')
    assert err.value.field_name == "title"


def test_all_valid_file(tmp_path):
    feed = tmp_path / "batch.jsonl"
    _write_articles(feed, 10)
    with Store(tmp_path / "store") as store:
        result = ingest_batch(store, feed, "articles")
    assert (result.accepted, result.rejected_lines) == (10, [])


def test_reingest_is_idempotent(tmp_path):
    feed = tmp_path / "batch.jsonl"
    _write_articles(feed, 5)
    with Store(tmp_path / "store") as store:
        first = ingest_batch(store, feed, "articles")
        second = ingest_batch(store, feed, "articles")
        assert first.accepted == 5
        assert (second.accepted, second.rejected_lines) == (0, [])
        assert len(store.articles()) == 5


def test_malformed_lines_reported_by_number(tmp_path):
    feed = tmp_path / "batch.jsonl"
    _write_articles(feed, 10, mangle={3, 7})
    with Store(tmp_path / "store") as store:
        result = ingest_batch(store, feed, "articles")
    assert (result.accepted, result.rejected_lines) == (8, [3, 7])


def test_all_rejected_is_not_an_error(tmp_path):
    feed = tmp_path / "bad.jsonl"
    feed.write_text("nope\nstill nope\n", encoding="utf-8")
    with Store(tmp_path / "store") as store:
        result = ingest_batch(store, feed, "articles")
    assert result.accepted == 0
    assert result.rejected_lines == [1, 2]


def test_unreadable_path_raises_oserror(tmp_path):
    with Store(tmp_path / "store") as store:
        with pytest.raises(OSError):
            ingest_batch(store, tmp_path / "missing.jsonl", "articles")


def test_bad_kind_rejected(tmp_path):
    with Store(tmp_path / "store") as store:
        with pytest.raises(ValueError):
            ingest_batch(store, tmp_path / "x.jsonl", "nonsense")


def test_directory_feed_sees_each_file_once(tmp_path):
    feed_dir = tmp_path / "drop"
    feed_dir.mkdir()
    _write_articles(feed_dir / "b.jsonl", 2)
    feed = DirectoryFeed(feed_dir)
    assert [p.name for p in feed.poll()] == ["b.jsonl"]
    # a.jsonl arrives later but sorts first; only the new file shows up
    _write_articles(feed_dir / "a.jsonl", 1)
    assert [p.name for p in feed.poll()] == ["a.jsonl"]
    assert feed.poll() == []


def test_read_articles_returns_rejects(tmp_path):
    feed = tmp_path / "gold.jsonl"
    _write_articles(feed, 4, mangle={2})
    articles, rejected = read_articles(feed)
    assert [a.id for a in articles] == ["a1", "a3", "a4"]
    assert rejected == [2]
