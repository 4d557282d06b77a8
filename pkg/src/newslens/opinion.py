"""Coordinated-behavior analysis over forum discussions.

Pipeline: per-user-pair contingency tables over thread presence → phi
coefficient → association graph (edge iff phi exceeds a threshold) → biased
random-walk embeddings for nearest-neighbor queries → dense-community alarm
per event → bot-phrase ratio over the event's comments.

The embedding trainer (second-order walks plus skip-gram with negative
sampling) is written against seeded numpy so identical inputs produce
bit-identical vectors; off-the-shelf trainers do not make that guarantee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import networkx as nx
import numpy as np

from .metrics import DEFAULT_MATCH_THRESHOLD, match_threads
from .records import Comment, CommunityReport, DiscussionThread
from .vectorize import tokenize

DEFAULT_PHI_THRESHOLD = 0.6
DEFAULT_DENSITY_THRESHOLD = 0.7
DEFAULT_MIN_COMMUNITY = 4
DEFAULT_PHRASE_N = 4
DEFAULT_PHRASE_SUPPORT = 3

# word2vec-style unigram table; large enough that ^0.75 weighting survives
# rounding for the vocabulary sizes this module sees.
_NOISE_TABLE_SIZE = 100_000


@dataclass(frozen=True)
class ContingencyTable:
    """2x2 presence counts for a user pair: both, i-only, j-only, neither."""

    n11: int
    n10: int
    n01: int
    n00: int

    def __post_init__(self):
        if min(self.n11, self.n10, self.n01, self.n00) < 0:
            raise ValueError("contingency counts must be non-negative")

    @property
    def total(self) -> int:
        return self.n11 + self.n10 + self.n01 + self.n00

    def swapped(self) -> "ContingencyTable":
        return ContingencyTable(self.n11, self.n01, self.n10, self.n00)


def presence_map(users: Iterable[str], threads: Sequence[DiscussionThread]) -> dict[str, set[int]]:
    """Thread indices each user commented in; multiple comments count once."""
    wanted = set(users)
    found: dict[str, set[int]] = {u: set() for u in wanted}
    for index, thread in enumerate(threads):
        for author in thread.commenters():
            if author in wanted:
                found[author].add(index)
    return found


def contingency(user_i: str, user_j: str, threads: Sequence[DiscussionThread]) -> ContingencyTable:
    if user_i == user_j:
        raise ValueError("contingency requires two distinct users")
    if not threads:
        raise ValueError("threads must be non-empty")
    presence = presence_map((user_i, user_j), threads)
    set_i, set_j = presence[user_i], presence[user_j]
    n11 = len(set_i & set_j)
    return ContingencyTable(
        n11=n11,
        n10=len(set_i) - n11,
        n01=len(set_j) - n11,
        n00=len(threads) - len(set_i | set_j),
    )


def phi(table: ContingencyTable) -> float:
    """Phi coefficient; any zero margin yields 0.0 (no evidence either way)."""
    row1 = table.n11 + table.n10
    row0 = table.n01 + table.n00
    col1 = table.n11 + table.n01
    col0 = table.n10 + table.n00
    denom = row1 * row0 * col1 * col0
    if denom == 0:
        return 0.0
    return (table.n11 * table.n00 - table.n10 * table.n01) / math.sqrt(denom)


def build_user_graph(users: Iterable[str], threads: Sequence[DiscussionThread],
                     phi_threshold: float = DEFAULT_PHI_THRESHOLD) -> nx.Graph:
    """Association graph: edge (i, j) iff pairwise phi is strictly above threshold."""
    if not (-1.0 < phi_threshold < 1.0):
        raise ValueError("phi_threshold must lie in (-1, 1)")
    ordered = sorted(set(users))
    graph = nx.Graph()
    graph.add_nodes_from(ordered)
    if not threads:
        return graph
    presence = presence_map(ordered, threads)
    total = len(threads)
    for a_pos, user_a in enumerate(ordered):
        set_a = presence[user_a]
        for user_b in ordered[a_pos + 1:]:
            set_b = presence[user_b]
            n11 = len(set_a & set_b)
            table = ContingencyTable(
                n11=n11,
                n10=len(set_a) - n11,
                n01=len(set_b) - n11,
                n00=total - len(set_a | set_b),
            )
            value = phi(table)
            if value > phi_threshold:
                graph.add_edge(user_a, user_b, phi=value)
    return graph


@dataclass(frozen=True)
class Node2VecParams:
    dims: int = 64
    walks_per_node: int = 10
    walk_length: int = 40
    return_p: float = 1.0
    inout_q: float = 0.5
    context_window: int = 5
    epochs: int = 5
    negative: int = 5
    learning_rate: float = 0.025
    seed: int = 0

    def __post_init__(self):
        if self.dims < 2:
            raise ValueError("embedding dims must be >= 2")
        if self.walk_length < 1 or self.walks_per_node < 1:
            raise ValueError("walk parameters must be positive")
        if self.return_p <= 0 or self.inout_q <= 0:
            raise ValueError("return_p and inout_q must be positive")

    @classmethod
    def from_dict(cls, raw: Mapping) -> "Node2VecParams":
        known = {k: raw[k] for k in cls.__dataclass_fields__ if k in raw}
        return cls(**known)


def _generate_walks(adjacency: dict[str, list[str]], nodes: Sequence[str],
                    params: Node2VecParams, rng: np.random.Generator) -> list[list[str]]:
    """Second-order biased walks; transitions are uniform over neighbors,
    reweighted by 1/p for returning and 1/q for moving outward."""
    walks: list[list[str]] = []
    neighbor_sets = {node: set(adjacency[node]) for node in nodes}
    for _ in range(params.walks_per_node):
        for start in nodes:
            walk = [start]
            while len(walk) < params.walk_length:
                current = walk[-1]
                choices = adjacency[current]
                if not choices:
                    break
                if len(walk) == 1:
                    nxt = choices[int(rng.integers(len(choices)))]
                else:
                    prev = walk[-2]
                    prev_neighbors = neighbor_sets[prev]
                    weights = np.empty(len(choices))
                    for pos, candidate in enumerate(choices):
                        if candidate == prev:
                            weights[pos] = 1.0 / params.return_p
                        elif candidate in prev_neighbors:
                            weights[pos] = 1.0
                        else:
                            weights[pos] = 1.0 / params.inout_q
                    weights /= weights.sum()
                    nxt = choices[int(rng.choice(len(choices), p=weights))]
                walk.append(nxt)
            walks.append(walk)
    return walks


def _noise_table(counts: np.ndarray) -> np.ndarray:
    weights = counts.astype(np.float64) ** 0.75
    weights /= weights.sum()
    # Cumulative allocation keeps every vocabulary entry representable.
    boundaries = np.floor(np.cumsum(weights) * _NOISE_TABLE_SIZE).astype(np.int64)
    table = np.zeros(_NOISE_TABLE_SIZE, dtype=np.int64)
    start = 0
    for word_index, end in enumerate(boundaries):
        table[start:end] = word_index
        start = end
    table[start:] = len(counts) - 1
    return table


def _train_sgns(walks: list[list[int]], vocab_size: int, params: Node2VecParams,
                rng: np.random.Generator) -> np.ndarray:
    counts = np.zeros(vocab_size, dtype=np.int64)
    for walk in walks:
        for token in walk:
            counts[token] += 1
    table = _noise_table(counts)

    dims = params.dims
    vectors = (rng.random((vocab_size, dims)) - 0.5) / dims
    contexts = np.zeros((vocab_size, dims))

    pairs_per_walk = [
        sum(
            min(len(walk) - 1, i + params.context_window) - max(0, i - params.context_window)
            for i in range(len(walk))
        )
        for walk in walks
    ]
    total_updates = max(1, sum(pairs_per_walk) * params.epochs)
    lr0 = params.learning_rate
    min_lr = lr0 * 1e-4
    done = 0

    for _ in range(params.epochs):
        for walk in walks:
            if len(walk) < 2:
                continue
            # Draw this walk's negatives in one call: deterministic and cheap.
            walk_pairs = []
            for i, center in enumerate(walk):
                lo = max(0, i - params.context_window)
                hi = min(len(walk), i + params.context_window + 1)
                for j in range(lo, hi):
                    if j != i:
                        walk_pairs.append((center, walk[j]))
            negatives = table[rng.integers(0, _NOISE_TABLE_SIZE, size=(len(walk_pairs), params.negative))]
            for pair_pos, (center, context) in enumerate(walk_pairs):
                lr = max(min_lr, lr0 * (1.0 - done / total_updates))
                targets = np.empty(params.negative + 1, dtype=np.int64)
                targets[0] = context
                targets[1:] = negatives[pair_pos]
                labels = np.zeros(params.negative + 1)
                labels[0] = 1.0
                # A sampled negative equal to the true context is skipped.
                mask = np.ones(params.negative + 1)
                mask[1:][targets[1:] == context] = 0.0
                rows = contexts[targets]
                scores = rows @ vectors[center]
                gradient = (labels - 1.0 / (1.0 + np.exp(-scores))) * mask * lr
                delta_center = gradient @ rows
                np.add.at(contexts, targets, gradient[:, None] * vectors[center])
                vectors[center] += delta_center
                done += 1
    return vectors


def embed_users(graph: nx.Graph, params: Node2VecParams | None = None) -> dict[str, np.ndarray]:
    """Walk-based node embeddings; isolated nodes map to the zero vector."""
    if graph.number_of_nodes() == 0:
        raise ValueError("graph must contain at least one node")
    params = params or Node2VecParams()
    rng = np.random.default_rng(params.seed)

    nodes = sorted(graph.nodes)
    adjacency = {node: sorted(graph.neighbors(node)) for node in nodes}
    connected = [node for node in nodes if adjacency[node]]
    embedding = {node: np.zeros(params.dims) for node in nodes}
    if not connected:
        return embedding

    walks = _generate_walks(adjacency, connected, params, rng)
    index_of = {node: i for i, node in enumerate(connected)}
    walk_ids = [[index_of[step] for step in walk] for walk in walks]
    vectors = _train_sgns(walk_ids, len(connected), params, rng)
    for node, row in zip(connected, vectors):
        embedding[node] = row
    return embedding


def _cosine_dense(a: np.ndarray, b: np.ndarray) -> float:
    norm = float(np.linalg.norm(a) * np.linalg.norm(b))
    if norm == 0.0:
        return 0.0
    return float(np.dot(a, b) / norm)


def knn_users(embedding: Mapping[str, np.ndarray], user: str, k: int) -> list[tuple[str, float]]:
    """k nearest users by cosine, query excluded; ties broken by user id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if user not in embedding:
        raise KeyError(user)
    query = embedding[user]
    scored = [
        (other, _cosine_dense(query, vector))
        for other, vector in embedding.items()
        if other != user
    ]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:k]


def event_repliers(titles: Sequence[str], threads: Sequence[DiscussionThread],
                   match_threshold: float = DEFAULT_MATCH_THRESHOLD) -> tuple[set[str], list[DiscussionThread]]:
    matched = match_threads(titles, threads, match_threshold)
    users: set[str] = set()
    for thread in matched:
        users |= thread.commenters()
    return users, matched


def detect_dense_community(event_label: str, titles: Sequence[str],
                           threads: Sequence[DiscussionThread], graph: nx.Graph,
                           density_threshold: float = DEFAULT_DENSITY_THRESHOLD,
                           min_size: int = DEFAULT_MIN_COMMUNITY,
                           match_threshold: float = DEFAULT_MATCH_THRESHOLD) -> CommunityReport:
    """Densest connected component among the event's repliers.

    Components smaller than min_size never qualify; with no qualifying
    component the report is unflagged and empty. Ties on density go to the
    larger component, then the lexicographically smallest user set.
    """
    if not (0.0 < density_threshold <= 1.0):
        raise ValueError("density_threshold must lie in (0, 1]")
    if min_size < 2:
        raise ValueError("min_size must be >= 2")
    users, _ = event_repliers(titles, threads, match_threshold)
    subgraph = graph.subgraph(user for user in users if user in graph)

    best: tuple[float, int, tuple[str, ...]] | None = None
    for component in nx.connected_components(subgraph):
        size = len(component)
        if size < min_size:
            continue
        internal = subgraph.subgraph(component).number_of_edges()
        density = internal / (size * (size - 1) / 2)
        candidate = (density, size, tuple(sorted(component)))
        if best is None or (-candidate[0], -candidate[1], candidate[2]) < (-best[0], -best[1], best[2]):
            best = candidate
    if best is None:
        return CommunityReport(event_label=event_label)
    density, _, members = best
    return CommunityReport(
        event_label=event_label,
        users=members,
        density=density,
        flagged=density >= density_threshold,
    )


def bot_phrase_ratio(comments: Sequence[Comment], n: int = DEFAULT_PHRASE_N,
                     min_support: int = DEFAULT_PHRASE_SUPPORT) -> float:
    """Share of comments containing the most common token n-gram.

    A phrase below min_support supporting comments is treated as noise and
    the ratio is 0.0. Support counts distinct comments, not occurrences.
    """
    if not comments:
        raise ValueError("comments must be non-empty")
    if n < 2:
        raise ValueError("phrase length must be >= 2")
    if min_support < 2:
        raise ValueError("min_support must be >= 2")
    support: dict[tuple[str, ...], int] = {}
    for comment in comments:
        tokens = tokenize(comment.text)
        grams = {tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1)}
        for gram in grams:
            support[gram] = support.get(gram, 0) + 1
    if not support:
        return 0.0
    top_gram = min(support, key=lambda g: (-support[g], g))
    if support[top_gram] < min_support:
        return 0.0
    return support[top_gram] / len(comments)


def community_with_phrases(report: CommunityReport, threads: Sequence[DiscussionThread],
                           titles: Sequence[str],
                           n: int = DEFAULT_PHRASE_N,
                           min_support: int = DEFAULT_PHRASE_SUPPORT,
                           match_threshold: float = DEFAULT_MATCH_THRESHOLD) -> CommunityReport:
    """Attach the bot-phrase ratio over the event's matched comments."""
    matched = match_threads(titles, threads, match_threshold)
    comments = [c for thread in matched for c in thread.comments]
    if not comments:
        return report
    return replace(report, bot_phrase_ratio=bot_phrase_ratio(comments, n, min_support))
