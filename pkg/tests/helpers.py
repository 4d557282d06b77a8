"""Shared fixture builders for the test suite."""

from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone

from newslens.records import Article, Comment, DiscussionThread

T0 = datetime(2025, 6, 1, tzinfo=timezone.utc)


def make_article(article_id: str, *, title: str = "quick brown fox jumps",
                 content: str = "the quick brown fox jumps over the lazy dog",
                 source: str = "daily-alpha", hours: float = 0.0,
                 gold_tags: tuple[str, ...] = ()) -> Article:
    return Article(
        id=article_id,
        source=source,
        url=f"https://example.test/{article_id}",
        title=title,
        content=content,
        published_at=T0 + timedelta(hours=hours),
        gold_tags=gold_tags,
    )


def make_comment(author: str, text: str = "plain reply", minutes: float = 0.0) -> Comment:
    return Comment(author=author, text=text, posted_at=T0 + timedelta(minutes=minutes))


def make_thread(thread_id: str, *, title: str = "quick brown fox jumps",
                authors: tuple[str, ...] = (), hours: float = 0.0,
                comments: tuple[Comment, ...] | None = None) -> DiscussionThread:
    if comments is None:
        comments = tuple(
            make_comment(author, minutes=hours * 60 + i) for i, author in enumerate(authors)
        )
    return DiscussionThread(
        id=thread_id,
        forum="forum-omega",
        post_title=title,
        posted_at=T0 + timedelta(hours=hours),
        comments=comments,
    )


def incidence_threads(rows: dict[str, set[int]], total: int) -> list[DiscussionThread]:
    """Threads built from a user -> thread-index incidence mapping."""
    return [
        make_thread(
            f"th-{index:03d}",
            authors=tuple(sorted(u for u, present in rows.items() if index in present)),
            hours=float(index),
        )
        for index in range(total)
    ]


def grid_vocab_corpus(rng: random.Random, n_docs: int, vocab: int = 5) -> list[Article]:
    """Articles over a tiny integer-grid vocabulary, for clustering oracles.

    Titles/contents repeat a handful of terms so tf-idf vectors land on a
    coarse grid; cosine values then sit safely away from threshold edges.
    """
    words = [f"term{i}" for i in range(vocab)]
    docs = []
    for d in range(n_docs):
        counts = [rng.randint(0, 3) for _ in range(vocab)]
        if sum(counts) == 0:
            counts[rng.randrange(vocab)] = 1
        body = " ".join(
            word for word, count in zip(words, counts) for _ in range(count)
        )
        docs.append(make_article(f"doc-{d:02d}", title=body or words[0], content=body,
                                 hours=float(d)))
    return docs
