"""Batch pipeline stages: cluster articles into events, then score them.

Stages read from and write to the store only — re-running a stage on an
unchanged store reproduces the same records, which is what makes the CLI
commands resumable after a crash.
"""

from __future__ import annotations

import logging
from dataclasses import replace

from . import cluster as cluster_mod
from . import opinion, titling, vectorize
from .config import PipelineConfig
from .metrics import compose_metrics, default_scorers
from .records import Article, EventRecord
from .store import Store

log = logging.getLogger(__name__)


class StageError(Exception):
    """A stage ran before its prerequisite stage."""

    def __init__(self, stage: str, message: str):
        super().__init__(message)
        self.stage = stage


def stage_cluster(store: Store, config: PipelineConfig) -> dict:
    """Window-cluster all ingested articles and store one record per event."""
    articles = store.articles()
    if not articles:
        raise StageError("cluster", "store has no articles; run `ingest` first")

    model = vectorize.fit(articles, min_df=config.vectorizer.min_df)
    vectors = {
        article.id: vectorize.embed(model, article, title_weight=config.vectorizer.title_weight)
        for article in articles
    }
    state = cluster_mod.run_windows(
        articles, vectors, config.cluster.params(), config.cluster.window(),
    )

    by_id = {article.id: article for article in articles}
    groups: dict[str, list[Article]] = {}
    for article_id, event_label in state.labels.items():
        groups.setdefault(event_label.label, []).append(by_id[article_id])

    stored = 0
    for label in sorted(groups):
        members = sorted(groups[label], key=lambda a: (a.published_at, a.id))
        title = titling.select_event_title(members)
        if config.tags.method == "textrank":
            tags = titling.extract_tags_textrank(members, k=config.tags.k)
        else:
            tags = titling.extract_tags_tfidf(members, model, k=config.tags.k)
        record = EventRecord(
            label=label,
            title=title,
            article_ids=tuple(a.id for a in members),
            first_seen=min(a.published_at for a in members),
            last_seen=max(a.published_at for a in members),
            tags=tuple(tags),
        )
        store.upsert_event(record)
        stored += 1
    log.info("clustered %d articles into %d events", len(articles), stored)
    return {"articles": len(articles), "events": stored}


def stage_analyze(store: Store, config: PipelineConfig) -> dict:
    """Fill metrics and community reports for every stored event."""
    snapshot = store.snapshot()
    if not snapshot.events:
        raise StageError("analyze", "store has no events; run `cluster` first")
    threads = store.threads()
    scorers = default_scorers()

    graph = None
    if threads:
        users = sorted({author for thread in threads for author in thread.commenters()})
        graph = opinion.build_user_graph(users, threads, config.opinion.phi_threshold)

    flagged = 0
    for label in sorted(snapshot.events):
        event = snapshot.events[label]
        members = [snapshot.articles[aid] for aid in event.article_ids if aid in snapshot.articles]
        if not members:
            log.warning("event %s references no stored articles; skipped", label)
            continue
        titles = [a.title for a in members]
        metrics = compose_metrics(
            members, threads, scorers,
            suspicion_weights=config.metrics.suspicion_weights,
            match_threshold=config.metrics.match_threshold,
        )
        community = None
        if graph is not None:
            community = opinion.detect_dense_community(
                label, titles, threads, graph,
                density_threshold=config.opinion.density_threshold,
                min_size=config.opinion.min_community,
                match_threshold=config.metrics.match_threshold,
            )
            community = opinion.community_with_phrases(
                community, threads, titles,
                n=config.opinion.phrase_n,
                min_support=config.opinion.phrase_support,
                match_threshold=config.metrics.match_threshold,
            )
            if community.flagged:
                flagged += 1
        store.upsert_event(replace(event, metrics=metrics, community=community))
    log.info("analyzed %d events, %d flagged communities", len(snapshot.events), flagged)
    return {"events": len(snapshot.events), "flagged": flagged}
