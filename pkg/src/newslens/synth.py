"""Seeded synthetic corpora with known ground truth.

Generates plausible-shaped articles for a configurable number of planted
events (disjoint keyword vocabularies, shared common words), forum threads
whose titles fuzzily match event titles, and an optional sockpuppet group
that co-replies across a fixed subset of one event's threads. The manifest
records every planted fact so tests can score recovery.

Everything is driven by one `random.Random(seed)` in a fixed draw order;
identical parameters produce byte-identical output files.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

from .records import Article, Comment, DiscussionThread, dump_json, format_timestamp

_SYLLABLES = (
    "ba", "be", "bo", "da", "de", "di", "fa", "fe", "ga", "go",
    "ka", "ke", "ki", "la", "le", "lo", "ma", "me", "mi", "na",
    "ne", "no", "pa", "pe", "po", "ra", "re", "ri", "sa", "se",
    "so", "ta", "te", "ti", "va", "ve", "vo", "za", "ze", "zo",
)

_SOURCES = ("daily-alpha", "metro-beta", "wire-gamma", "channel-delta", "post-epsilon")

KEYWORDS_PER_EVENT = 12
COMMON_WORDS = 25
DEFAULT_START = datetime(2025, 6, 1, tzinfo=timezone.utc)


@dataclass(frozen=True)
class SynthParams:
    events: int = 10
    articles: int = 200
    threads: int = 60
    organic_users: int = 50
    sock_users: int = 8
    sock_threads: int = 20
    seed: int = 7
    start: datetime = DEFAULT_START

    def __post_init__(self):
        if self.events < 1 or self.articles < self.events:
            raise ValueError("need at least one article per event")
        if self.sock_users and self.sock_threads > self.threads:
            raise ValueError("sock_threads cannot exceed threads")


@dataclass(frozen=True)
class SynthCorpus:
    articles: tuple[Article, ...]
    threads: tuple[DiscussionThread, ...]
    manifest: dict


def _word(rng: random.Random) -> str:
    return "".join(rng.choice(_SYLLABLES) for _ in range(rng.randint(2, 4)))


def _word_pool(rng: random.Random, size: int, taken: set[str]) -> list[str]:
    pool: list[str] = []
    while len(pool) < size:
        candidate = _word(rng)
        if candidate not in taken:
            taken.add(candidate)
            pool.append(candidate)
    return pool


def _split_evenly(total: int, buckets: int) -> list[int]:
    base, extra = divmod(total, buckets)
    return [base + (1 if i < extra else 0) for i in range(buckets)]


def _title(rng: random.Random, keywords: list[str], commons: list[str]) -> str:
    picks = rng.sample(keywords, 5) + rng.sample(commons, 2)
    rng.shuffle(picks)
    return " ".join(picks)


def _content(rng: random.Random, keywords: list[str], commons: list[str]) -> str:
    length = rng.randint(40, 70)
    tokens = [
        rng.choice(keywords) if rng.random() < 0.65 else rng.choice(commons)
        for _ in range(length)
    ]
    return " ".join(tokens)


def _perturb_title(rng: random.Random, title: str) -> str:
    """Small edit that stays within the fuzzy-match budget (~15% of chars)."""
    words = title.split()
    move = rng.randint(0, 2)
    if move == 0:
        return title
    if move == 1 and len(words) > 2:
        drop = rng.randrange(len(words))
        return " ".join(w for i, w in enumerate(words) if i != drop)
    return title + " " + rng.choice(("talk", "take", "view"))


def generate_corpus(params: SynthParams) -> SynthCorpus:
    rng = random.Random(params.seed)
    taken: set[str] = set()
    commons = _word_pool(rng, COMMON_WORDS, taken)
    event_keywords = [_word_pool(rng, KEYWORDS_PER_EVENT, taken) for _ in range(params.events)]

    articles: list[Article] = []
    per_event = _split_evenly(params.articles, params.events)
    event_article_ids: list[list[str]] = [[] for _ in range(params.events)]
    serial = 0
    for event_index in range(params.events):
        event_start = params.start + timedelta(hours=10 * event_index)
        for _ in range(per_event[event_index]):
            serial += 1
            article_id = f"art-{serial:04d}"
            published = event_start + timedelta(minutes=rng.randint(0, 30 * 60))
            keywords = event_keywords[event_index]
            articles.append(Article(
                id=article_id,
                source=rng.choice(_SOURCES),
                url=f"https://example.test/{article_id}",
                title=_title(rng, keywords, commons),
                content=_content(rng, keywords, commons),
                published_at=published,
                gold_tags=tuple(sorted(rng.sample(keywords, 5))),
            ))
            event_article_ids[event_index].append(article_id)

    threads, sock_manifest = _generate_threads(rng, params, articles, event_article_ids, commons)

    manifest = {
        "seed": params.seed,
        "params": {
            "events": params.events,
            "articles": params.articles,
            "threads": params.threads,
            "organic_users": params.organic_users,
            "sock_users": params.sock_users,
            "sock_threads": params.sock_threads,
            "start": format_timestamp(params.start),
        },
        "events": [
            {
                "planted": f"planted-{i:02d}",
                "article_ids": event_article_ids[i],
                "keywords": sorted(event_keywords[i]),
            }
            for i in range(params.events)
        ],
        "sockpuppets": sock_manifest,
    }
    return SynthCorpus(articles=tuple(articles), threads=tuple(threads), manifest=manifest)


def _generate_threads(rng: random.Random, params: SynthParams, articles: list[Article],
                      event_article_ids: list[list[str]], commons: list[str]):
    by_id = {a.id: a for a in articles}
    socks = [f"sock-{i:02d}" for i in range(1, params.sock_users + 1)]
    organics = [f"user-{i:02d}" for i in range(1, params.organic_users + 1)]
    bot_phrase = " ".join(_word_pool(rng, 6, set(commons)))

    # The sock target event hosts the co-reply threads plus some organic ones.
    target = 0
    counts = [0] * params.events
    if params.sock_users:
        counts[target] = min(params.threads, params.sock_threads + 4)
    remaining = params.threads - sum(counts)
    others = [i for i in range(params.events) if counts[i] == 0] or [target]
    for offset in range(remaining):
        counts[others[offset % len(others)]] += 1

    threads: list[DiscussionThread] = []
    sock_thread_ids: list[str] = []
    serial = 0
    for event_index in range(params.events):
        for local in range(counts[event_index]):
            serial += 1
            thread_id = f"th-{serial:04d}"
            source_article = by_id[rng.choice(event_article_ids[event_index])]
            posted = source_article.published_at + timedelta(minutes=rng.randint(30, 48 * 60))
            comments: list[Comment] = []
            minute = 0
            for _ in range(rng.randint(2, 6)):
                minute += rng.randint(1, 30)
                comments.append(Comment(
                    author=rng.choice(organics),
                    text=" ".join(rng.choice(commons) for _ in range(rng.randint(5, 10))),
                    posted_at=posted + timedelta(minutes=minute),
                ))
            is_sock_thread = params.sock_users and event_index == target and local < params.sock_threads
            if is_sock_thread:
                sock_thread_ids.append(thread_id)
                for author in socks:
                    minute += rng.randint(1, 10)
                    comments.append(Comment(
                        author=author,
                        text=f"{bot_phrase} {rng.choice(commons)}",
                        posted_at=posted + timedelta(minutes=minute),
                    ))
            threads.append(DiscussionThread(
                id=thread_id,
                forum="forum-omega",
                post_title=_perturb_title(rng, source_article.title),
                posted_at=posted,
                comments=tuple(comments),
            ))

    # Stray replies keep sock activity from being perfectly clean.
    extra_threads = [t for t in threads if t.id not in sock_thread_ids]
    if params.sock_users and extra_threads:
        patched: dict[str, DiscussionThread] = {}
        for author in socks:
            stray = rng.choice(extra_threads)
            base = patched.get(stray.id, stray)
            patched[stray.id] = DiscussionThread(
                id=base.id,
                forum=base.forum,
                post_title=base.post_title,
                posted_at=base.posted_at,
                comments=base.comments + (Comment(
                    author=author,
                    text=" ".join(rng.choice(commons) for _ in range(6)),
                    posted_at=base.posted_at + timedelta(minutes=rng.randint(60, 120)),
                ),),
            )
        threads = [patched.get(t.id, t) for t in threads]

    sock_manifest = {
        "users": socks,
        "thread_ids": sock_thread_ids,
        "event": f"planted-{target:02d}" if params.sock_users else None,
        "bot_phrase": bot_phrase if params.sock_users else None,
    }
    return threads, sock_manifest


def write_corpus(corpus: SynthCorpus, out_dir: str | Path) -> dict[str, Path]:
    """Write articles.jsonl, discussions.jsonl, and truth.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "articles": out / "articles.jsonl",
        "discussions": out / "discussions.jsonl",
        "truth": out / "truth.json",
    }
    with paths["articles"].open("w", encoding="utf-8") as handle:
        for article in corpus.articles:
            handle.write(dump_json(article.to_dict()) + "\n")
    with paths["discussions"].open("w", encoding="utf-8") as handle:
        for thread in corpus.threads:
            handle.write(dump_json(thread.to_dict()) + "\n")
    paths["truth"].write_text(dump_json(corpus.manifest) + "\n", encoding="utf-8")
    return paths


def planted_assignment(manifest: dict) -> dict[str, str]:
    """article id -> planted event name, straight from the manifest."""
    return {
        article_id: entry["planted"]
        for entry in manifest["events"]
        for article_id in entry["article_ids"]
    }
