"""Event title selection and extractive tag generation.

A representative title is picked per event by ranking a lexical-overlap
graph whose nodes are all member titles plus content sentences; only titles
are candidates (content nodes influence the ranking but cannot win). Tags
come from two extractive baselines, summed tf-idf weight and a word
co-occurrence graph ranking, behind a common tagger interface so a
model-backed generator can be mounted later.
"""

from __future__ import annotations

import re
import unicodedata
from collections import Counter
from dataclasses import dataclass
from datetime import datetime
from typing import Protocol, Sequence

import numpy as np

from .records import Article
from .vectorize import VectorizerModel, tokenize

DAMPING = 0.85
TOLERANCE = 1e-6
MAX_ITERATIONS = 100

# tag text -> confidence, descending by confidence
TagSet = list[tuple[str, float]]

_SENTENCE_END = re.compile(r"[.!?。！？…;；\n]+")


def split_sentences(text: str) -> list[str]:
    """Split on terminal punctuation; empty pieces are dropped."""
    return [piece.strip() for piece in _SENTENCE_END.split(text) if piece.strip()]


def normalize_tag(tag: str) -> str:
    return unicodedata.normalize("NFKC", tag).casefold().strip()


@dataclass(frozen=True)
class GraphNode:
    kind: str  # "title" | "sentence"
    text: str
    tokens: tuple[str, ...]
    article_id: str
    published_at: datetime


@dataclass
class TextRankGraph:
    nodes: list[GraphNode]
    weights: np.ndarray  # symmetric, non-negative, zero diagonal
    damping: float = DAMPING


@dataclass
class RankResult:
    scores: np.ndarray  # sums to node count
    iterations: int
    converged: bool
    delta: float


def power_rank(weights: np.ndarray, damping: float = DAMPING,
               tol: float = TOLERANCE, max_iter: int = MAX_ITERATIONS) -> RankResult:
    """Damped power iteration over a weighted undirected graph.

    The iterate is kept on the probability scale (sum 1), where successive
    L1 change contracts by at least the damping factor regardless of graph
    shape; nodes without edges redistribute uniformly. Returned scores are
    rescaled so they sum to the node count.
    """
    n = weights.shape[0]
    if n == 0:
        raise ValueError("cannot rank an empty graph")
    if n == 1:
        return RankResult(scores=np.ones(1), iterations=0, converged=True, delta=0.0)
    totals = weights.sum(axis=0)
    dangling = totals <= 0.0
    transition = weights / np.where(dangling, 1.0, totals)
    x = np.full(n, 1.0 / n)
    iterations = 0
    delta = float("inf")
    while iterations < max_iter:
        spread = transition @ x + x[dangling].sum() / n
        updated = (1.0 - damping) / n + damping * spread
        delta = float(np.abs(updated - x).sum())
        x = updated
        iterations += 1
        if delta < tol:
            break
    return RankResult(scores=x * n, iterations=iterations, converged=delta < tol, delta=delta)


def _overlap_weight(a: tuple[str, ...], b: tuple[str, ...]) -> float:
    # Nodes of fewer than two tokens contribute a zero log-length term and
    # therefore carry no edges.
    if len(a) < 2 or len(b) < 2:
        return 0.0
    shared = len(set(a) & set(b))
    if shared == 0:
        return 0.0
    return shared / (np.log(len(a)) + np.log(len(b)))


def build_title_graph(cluster: Sequence[Article], titles_only: bool = False,
                      damping: float = DAMPING) -> TextRankGraph:
    """Nodes are every member title plus every content sentence.

    Edge weight between two nodes is shared-token count over the sum of
    log token-lengths. titles_only drops the sentence nodes (measurably
    worse ranking; kept for A/B comparison).
    """
    if not cluster:
        raise ValueError("cannot build a title graph for an empty cluster")
    ordered = sorted(cluster, key=lambda a: (a.published_at, a.id))
    nodes: list[GraphNode] = []
    for article in ordered:
        nodes.append(GraphNode(
            kind="title", text=article.title, tokens=tuple(tokenize(article.title)),
            article_id=article.id, published_at=article.published_at,
        ))
        if titles_only:
            continue
        for sentence in split_sentences(article.content):
            tokens = tuple(tokenize(sentence))
            if tokens:
                nodes.append(GraphNode(
                    kind="sentence", text=sentence, tokens=tokens,
                    article_id=article.id, published_at=article.published_at,
                ))
    n = len(nodes)
    weights = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            w = _overlap_weight(nodes[i].tokens, nodes[j].tokens)
            if w > 0.0:
                weights[i, j] = weights[j, i] = w
    return TextRankGraph(nodes=nodes, weights=weights, damping=damping)


def select_event_title(cluster: Sequence[Article], titles_only: bool = False) -> str:
    """Highest-ranked title node; ties go to the earliest published article."""
    graph = build_title_graph(cluster, titles_only=titles_only)
    result = power_rank(graph.weights, damping=graph.damping)
    candidates = [
        (node, result.scores[idx])
        for idx, node in enumerate(graph.nodes)
        if node.kind == "title"
    ]
    best, _ = min(candidates, key=lambda pair: (-pair[1], pair[0].published_at, pair[0].article_id))
    return best.text


class Tagger(Protocol):
    """Pluggable tag generator contract."""

    def tag(self, title: str, content: str, source: str) -> TagSet: ...


def _dedupe(ranked: list[tuple[str, float]], k: int) -> TagSet:
    seen: set[str] = set()
    out: TagSet = []
    for tag, score in ranked:
        key = normalize_tag(tag)
        if key and key not in seen:
            seen.add(key)
            out.append((key, float(score)))
        if len(out) == k:
            break
    return out


def extract_tags_tfidf(cluster: Sequence[Article], model: VectorizerModel, k: int) -> TagSet:
    """Top-k terms by summed tf-idf over the cluster's concatenated text."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not cluster:
        raise ValueError("cannot tag an empty cluster")
    counts: Counter = Counter()
    for article in cluster:
        counts.update(tokenize(article.title))
        counts.update(tokenize(article.content))
    weighted = []
    for term, count in counts.items():
        idf = model.idf_of(term)
        if idf is not None:
            weighted.append((term, count * idf))
    weighted.sort(key=lambda pair: (-pair[1], pair[0]))
    return _dedupe(weighted, k)


def extract_tags_textrank(cluster: Sequence[Article], k: int) -> TagSet:
    """Top-k words from a window-2 co-occurrence graph over content tokens."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not cluster:
        raise ValueError("cannot tag an empty cluster")
    cooccur: Counter = Counter()
    terms: set[str] = set()
    for article in sorted(cluster, key=lambda a: (a.published_at, a.id)):
        tokens = tokenize(article.content)
        terms.update(tokens)
        for left, right in zip(tokens, tokens[1:]):
            if left != right:
                cooccur[(min(left, right), max(left, right))] += 1
    if not terms:
        return []
    ordered_terms = sorted(terms)
    index = {term: i for i, term in enumerate(ordered_terms)}
    weights = np.zeros((len(ordered_terms), len(ordered_terms)))
    for (left, right), count in cooccur.items():
        weights[index[left], index[right]] = weights[index[right], index[left]] = float(count)
    result = power_rank(weights)
    ranked = sorted(
        ((term, float(result.scores[index[term]])) for term in ordered_terms),
        key=lambda pair: (-pair[1], pair[0]),
    )
    return _dedupe(ranked, k)


def recall_at_k(predicted: TagSet, gold: set[str], k: int) -> float:
    """Fraction of gold tags present among the top-k predictions."""
    if not gold:
        raise ValueError("gold tag set must be non-empty")
    if k < 1:
        raise ValueError("k must be >= 1")
    gold_normed = {normalize_tag(t) for t in gold}
    gold_normed.discard("")
    if not gold_normed:
        raise ValueError("gold tag set is empty after normalization")
    top = {normalize_tag(tag) for tag, _ in predicted[:k]}
    return len(gold_normed & top) / len(gold_normed)


class TfidfTagger:
    def __init__(self, model: VectorizerModel, k: int = 10):
        self.model = model
        self.k = k

    def tag(self, title: str, content: str, source: str) -> TagSet:
        counts: Counter = Counter(tokenize(title))
        counts.update(tokenize(content))
        weighted = []
        for term, count in counts.items():
            idf = self.model.idf_of(term)
            if idf is not None:
                weighted.append((term, count * idf))
        weighted.sort(key=lambda pair: (-pair[1], pair[0]))
        return _dedupe(weighted, self.k)


class TextRankTagger:
    def __init__(self, k: int = 10):
        self.k = k

    def tag(self, title: str, content: str, source: str) -> TagSet:
        tokens = tokenize(content) or tokenize(title)
        if not tokens:
            return []
        cooccur: Counter = Counter()
        for left, right in zip(tokens, tokens[1:]):
            if left != right:
                cooccur[(min(left, right), max(left, right))] += 1
        ordered_terms = sorted(set(tokens))
        index = {term: i for i, term in enumerate(ordered_terms)}
        weights = np.zeros((len(ordered_terms), len(ordered_terms)))
        for (left, right), count in cooccur.items():
            weights[index[left], index[right]] = weights[index[right], index[left]] = float(count)
        result = power_rank(weights)
        ranked = sorted(
            ((term, float(result.scores[index[term]])) for term in ordered_terms),
            key=lambda pair: (-pair[1], pair[0]),
        )
        return _dedupe(ranked, self.k)
