"""Report rendering: delimited tables plus matplotlib figures beside them.

Two consumers: `eval-tags` (recall@K table + curve) and `report` (event
summary CSV + metric/tag figures for a store). Figures always land next to
the CSV they illustrate, under the caller's output directory.
"""

from __future__ import annotations

import csv
import logging
from datetime import timedelta
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")  # headless renders only; never touch a display
import matplotlib.pyplot as plt

from . import vectorize
from .records import Article, format_timestamp
from .store import METRIC_NAMES, Store
from .titling import TextRankTagger, TfidfTagger, recall_at_k

log = logging.getLogger(__name__)

DEFAULT_KS = (1, 3, 5, 10)


def evaluate_tags(articles: Sequence[Article], ks: Sequence[int] = DEFAULT_KS,
                  min_df: int = 2) -> list[dict]:
    """recall@K per tagger, averaged over articles that carry gold tags."""
    if any(k < 1 for k in ks):
        raise ValueError("every k must be >= 1")
    labeled = [a for a in articles if a.gold_tags]
    if not labeled:
        raise ValueError("no articles with gold tags")
    model = vectorize.fit(articles, min_df=min_df)
    max_k = max(ks)
    taggers = {
        "tfidf": TfidfTagger(model, k=max_k),
        "textrank": TextRankTagger(k=max_k),
    }
    rows = []
    for method in sorted(taggers):
        tagger = taggers[method]
        predictions = [
            tagger.tag(a.title, a.content, a.source) for a in labeled
        ]
        for k in ks:
            scores = [
                recall_at_k(predicted, set(article.gold_tags), k)
                for article, predicted in zip(labeled, predictions)
            ]
            rows.append({
                "method": method,
                "k": k,
                "recall": sum(scores) / len(scores),
                "articles": len(labeled),
            })
    return rows


def write_recall_csv(rows: Sequence[dict], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=["method", "k", "recall", "articles"])
        writer.writeheader()
        for row in rows:
            writer.writerow({**row, "recall": f"{row['recall']:.4f}"})
    return path


def render_recall_curve(rows: Sequence[dict], path: str | Path) -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    methods = sorted({row["method"] for row in rows})
    for method in methods:
        points = sorted(
            (row["k"], row["recall"]) for row in rows if row["method"] == method
        )
        ax.plot([p[0] for p in points], [p[1] for p in points], marker="o", label=method)
    ax.set_xlabel("K")
    ax.set_ylabel("recall@K")
    ax.set_ylim(0.0, 1.05)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def export_events_csv(store: Store, path: str | Path) -> Path:
    """One row per stored event with every metric column."""
    path = Path(path)
    snapshot = store.snapshot()
    fields = [
        "label", "title", "articles", "first_seen", "last_seen", "tags",
        *METRIC_NAMES, "community_flagged", "community_size", "bot_phrase_ratio",
    ]
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=fields)
        writer.writeheader()
        for label in sorted(snapshot.events):
            event = snapshot.events[label]
            row = {
                "label": event.label,
                "title": event.title,
                "articles": len(event.article_ids),
                "first_seen": format_timestamp(event.first_seen),
                "last_seen": format_timestamp(event.last_seen),
                "tags": " ".join(term for term, _ in event.tags),
            }
            for name in METRIC_NAMES:
                value = getattr(event.metrics, name) if event.metrics else ""
                row[name] = f"{value:.4f}" if isinstance(value, float) else value
            row["community_flagged"] = event.community.flagged if event.community else ""
            row["community_size"] = len(event.community.users) if event.community else ""
            row["bot_phrase_ratio"] = (
                f"{event.community.bot_phrase_ratio:.4f}" if event.community else ""
            )
            writer.writerow(row)
    return path


def render_metric_series(store: Store, metric: str, path: str | Path,
                         bucket_hours: float = 24.0) -> Path:
    path = Path(path)
    snapshot = store.snapshot()
    fig, ax = plt.subplots(figsize=(7, 4))
    if snapshot.events:
        lo = min(e.first_seen for e in snapshot.events.values())
        hi = max(e.last_seen for e in snapshot.events.values())
        points = store.metrics_timeseries(
            scope=None, metric=metric, time_from=lo, time_to=hi,
            bucket=timedelta(hours=bucket_hours),
        )
        ax.plot([p.bucket_start for p in points], [p.value for p in points], marker=".")
        fig.autofmt_xdate()
    ax.set_ylabel(metric)
    ax.set_title(f"mean {metric} per {bucket_hours:g}h bucket")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def render_trending_tags(store: Store, path: str | Path, k: int = 15) -> Path:
    path = Path(path)
    snapshot = store.snapshot()
    fig, ax = plt.subplots(figsize=(7, 4))
    if snapshot.events:
        lo = min(e.first_seen for e in snapshot.events.values())
        hi = max(e.last_seen for e in snapshot.events.values())
        ranked = store.trending_tags(time_from=lo, time_to=hi, k=k)
        if ranked:
            tags = [tag for tag, _ in ranked][::-1]
            counts = [count for _, count in ranked][::-1]
            ax.barh(tags, counts)
    ax.set_xlabel("events carrying tag")
    ax.set_title("trending tags")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def write_report(store: Store, out_dir: str | Path,
                 metrics: Sequence[str] = ("suspicion", "sentiment", "popularity_discussions"),
                 bucket_hours: float = 24.0) -> list[Path]:
    """Event CSV plus one figure per requested metric and the tag chart."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [export_events_csv(store, out / "events.csv")]
    for metric in metrics:
        written.append(render_metric_series(store, metric, out / f"{metric}.png", bucket_hours))
    written.append(render_trending_tags(store, out / "trending_tags.png"))
    log.info("wrote %d report files to %s", len(written), out)
    return written
