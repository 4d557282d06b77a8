"""Batch clustering of articles and sliding-window event labeling.

The batch procedure: every document seeds a cluster holding all documents
within cosine distance (similarity >= t1), overlapping clusters merge while
any pair's overlap ratio exceeds t2, and each document is finally assigned
to its largest containing cluster. A 72h/8h sliding window then carries
event labels across batches: a cluster of only-new articles mints a fresh
label, otherwise unlabeled members adopt the majority label; labels already
assigned never change.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from itertools import combinations
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .records import Article
from .vectorize import DocVector, pairwise_cosines

DEFAULT_T1 = 0.55
DEFAULT_T2 = 0.5
DEFAULT_WINDOW_HOURS = 72
DEFAULT_STRIDE_HOURS = 8


@dataclass(frozen=True)
class ClusterParams:
    t1: float = DEFAULT_T1
    t2: float = DEFAULT_T2

    def __post_init__(self):
        if not (0.0 <= self.t1 <= 1.0):
            raise ValueError(f"t1 must be in [0, 1], got {self.t1}")
        if not (0.0 < self.t2 <= 1.0):
            raise ValueError(f"t2 must be in (0, 1], got {self.t2}")


@dataclass(frozen=True)
class Cluster:
    """A set of article ids plus the creation index used for tie-breaking."""

    members: frozenset[str]
    created_from: int

    def __post_init__(self):
        if not self.members:
            raise ValueError("cluster must be non-empty")


def initial_clusters(ids: Sequence[str], sims: np.ndarray, t1: float) -> list[Cluster]:
    """Seed one cluster per document: everything with similarity >= t1 to it.

    The seed document always belongs to its own cluster, zero vector or not.
    """
    if len(ids) == 0:
        raise ValueError("cannot cluster an empty batch")
    clusters = []
    for i, seed in enumerate(ids):
        members = {ids[j] for j in np.nonzero(sims[i] >= t1)[0]}
        members.add(seed)
        clusters.append(Cluster(members=frozenset(members), created_from=i))
    return clusters


def overlap_ratio(a: frozenset[str] | Cluster, b: frozenset[str] | Cluster) -> float:
    """|A intersect B| / min(|A|, |B|)."""
    ma = a.members if isinstance(a, Cluster) else a
    mb = b.members if isinstance(b, Cluster) else b
    if not ma or not mb:
        raise ValueError("overlap ratio is undefined for empty clusters")
    return len(ma & mb) / min(len(ma), len(mb))


def merge_to_fixpoint(clusters: Sequence[Cluster], t2: float) -> list[Cluster]:
    """Merge cluster pairs while any overlap ratio exceeds t2.

    Pairs are taken in deterministic order (highest ratio first, ties by
    creation index) so the result is reproducible. Each merge shrinks the
    set by one, so at most n-1 merges run. On return no pair has ratio > t2.
    """
    active: dict[int, frozenset[str]] = {c.created_from: c.members for c in clusters}
    if len(active) != len(clusters):
        raise ValueError("duplicate cluster creation indices")
    next_index = max(active) + 1 if active else 0

    heap: list[tuple[float, int, int]] = []
    for i, j in combinations(sorted(active), 2):
        ratio = overlap_ratio(active[i], active[j])
        if ratio > t2:
            heapq.heappush(heap, (-ratio, i, j))

    while heap:
        _, i, j = heapq.heappop(heap)
        if i not in active or j not in active:
            continue  # stale entry; one side already merged away
        merged = active[i] | active[j]
        del active[i], active[j]
        for other_index, other in active.items():
            ratio = overlap_ratio(merged, other)
            if ratio > t2:
                heapq.heappush(heap, (-ratio, other_index, next_index))
        active[next_index] = merged
        next_index += 1

    return [Cluster(members=active[idx], created_from=idx) for idx in sorted(active)]


def assign_final_labels(ids: Sequence[str], clusters: Sequence[Cluster]) -> dict[str, Cluster]:
    """Map each article to its largest containing cluster.

    Size ties break toward the lexicographically smallest sorted member-id
    tuple, then the creation index, making the choice total and stable.
    """
    sort_keys = {
        c.created_from: (-len(c.members), tuple(sorted(c.members)), c.created_from)
        for c in clusters
    }
    containing: dict[str, list[Cluster]] = {}
    for cluster in clusters:
        for member in cluster.members:
            containing.setdefault(member, []).append(cluster)
    assignment: dict[str, Cluster] = {}
    for article_id in ids:
        candidates = containing.get(article_id)
        if not candidates:
            raise RuntimeError(f"article {article_id!r} lost by clustering; invariant broken")
        assignment[article_id] = min(candidates, key=lambda c: sort_keys[c.created_from])
    return assignment


def cluster_batch(ids: Sequence[str], vectors: Sequence[DocVector],
                  params: ClusterParams) -> list[frozenset[str]]:
    """Run the full batch procedure; returns the final partition.

    Each returned group is the set of articles assigned to one surviving
    cluster. Groups are disjoint and cover the batch.
    """
    if len(ids) != len(vectors):
        raise ValueError("ids and vectors must align")
    sims = pairwise_cosines(vectors)
    seeded = initial_clusters(ids, sims, params.t1)
    merged = merge_to_fixpoint(seeded, params.t2)
    assignment = assign_final_labels(ids, merged)
    groups: dict[int, set[str]] = {}
    for article_id, cluster in assignment.items():
        groups.setdefault(cluster.created_from, set()).add(article_id)
    return [frozenset(group) for _, group in sorted(groups.items())]


@dataclass(frozen=True)
class EventLabel:
    label: str
    first_seen: datetime


@dataclass(frozen=True)
class WindowConfig:
    window: timedelta = timedelta(hours=DEFAULT_WINDOW_HOURS)
    stride: timedelta = timedelta(hours=DEFAULT_STRIDE_HOURS)

    def __post_init__(self):
        if self.window <= timedelta(0) or self.stride <= timedelta(0):
            raise ValueError("window and stride must be positive")
        if self.stride > self.window:
            raise ValueError("stride must not exceed window")

    @classmethod
    def from_hours(cls, window_hours: float, stride_hours: float) -> "WindowConfig":
        return cls(window=timedelta(hours=window_hours), stride=timedelta(hours=stride_hours))


@dataclass
class LabelState:
    """Accumulated article -> event label assignments across window strides."""

    labels: dict[str, EventLabel] = field(default_factory=dict)
    next_index: int = 1

    def mint(self, first_seen: datetime) -> EventLabel:
        label = EventLabel(label=f"ev-{self.next_index:06d}", first_seen=first_seen)
        self.next_index += 1
        return label


def slide_and_label(state: LabelState, batch: Sequence[Article],
                    vectors: Sequence[DocVector], params: ClusterParams) -> dict[str, EventLabel]:
    """Cluster one window batch and propagate labels into it.

    All-unlabeled groups mint a fresh label; mixed groups give unlabeled
    members the majority label of the labeled ones (count ties break to the
    earlier first_seen, then the label id). Existing labels are never
    touched. Returns only the newly assigned labels.
    """
    by_id = {article.id: article for article in batch}
    groups = cluster_batch([a.id for a in batch], vectors, params)
    ordered = sorted(
        groups,
        key=lambda g: (min(by_id[aid].published_at for aid in g), min(g)),
    )
    assigned: dict[str, EventLabel] = {}
    for group in ordered:
        unlabeled = sorted(aid for aid in group if aid not in state.labels)
        if not unlabeled:
            continue
        labeled = [state.labels[aid] for aid in group if aid in state.labels]
        if labeled:
            votes: dict[str, list] = {}
            for lab in labeled:
                votes.setdefault(lab.label, [0, lab])
                votes[lab.label][0] += 1
            winner = min(
                votes.values(),
                key=lambda entry: (-entry[0], entry[1].first_seen, entry[1].label),
            )[1]
        else:
            winner = state.mint(min(by_id[aid].published_at for aid in group))
        for article_id in unlabeled:
            state.labels[article_id] = winner
            assigned[article_id] = winner
    return assigned


def iter_window_batches(articles: Sequence[Article],
                        cfg: WindowConfig) -> Iterator[tuple[datetime, list[Article]]]:
    """Yield (window_start, batch) in strict time order.

    Window starts sit on the stride grid anchored at the Unix epoch, so a
    given corpus always produces the same windows. Empty windows are skipped.
    """
    if not articles:
        return
    ordered = sorted(articles, key=lambda a: (a.published_at, a.id))
    stride_s = int(cfg.stride.total_seconds())
    window_s = int(cfg.window.total_seconds())
    first = int(ordered[0].published_at.timestamp())
    last = int(ordered[-1].published_at.timestamp())
    start = (first // stride_s) * stride_s
    while start <= last:
        end = start + window_s
        batch = [a for a in ordered if start <= int(a.published_at.timestamp()) < end]
        if batch:
            yield datetime.fromtimestamp(start, tz=ordered[0].published_at.tzinfo), batch
        start += stride_s


def run_windows(articles: Sequence[Article], vectors: dict[str, DocVector],
                params: ClusterParams, cfg: WindowConfig,
                state: LabelState | None = None,
                observer: Callable[[datetime, dict[str, EventLabel]], None] | None = None) -> LabelState:
    """Label a corpus through the sliding-window pipeline.

    Windows are processed strictly in time order because propagation depends
    on prior state. The optional observer sees a snapshot after each stride.
    """
    state = state or LabelState()
    for window_start, batch in iter_window_batches(articles, cfg):
        slide_and_label(state, batch, [vectors[a.id] for a in batch], params)
        if observer is not None:
            observer(window_start, dict(state.labels))
    return state
