"""Event-level quality metrics: suspicion factors, sentiment, popularity.

Suspicion is a weighted mean of three factors: title incitement, title bias
toward named entities, and content subjectivity outside quoted speech. Each
factor is computed by a pluggable scorer; the shipped defaults are
deterministic lexicon baselines so every score is auditable. Popularity
counts the event's articles plus forum threads matched by normalized edit
distance on titles.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Protocol, Sequence

from .records import Article, Comment, DiscussionThread, MetricScores
from .titling import split_sentences
from .vectorize import tokenize

DEFAULT_MATCH_THRESHOLD = 0.3
DEFAULT_SUSPICION_WEIGHTS = (1.0, 1.0, 1.0)

POSITIVE = "positive"
NEUTRAL = "neutral"
NEGATIVE = "negative"

# (opening, closing); symmetric marks need two occurrences
_QUOTE_PAIRS = (
    ('"', '"'),
    ("'", "'"),
    ("“", "”"),
    ("‘", "’"),
    ("「", "」"),
    ("『", "』"),
    ("«", "»"),
)


def load_lexicon(name: str) -> frozenset[str]:
    """Load a shipped lexicon: UTF-8, one term per line, '#' comments."""
    text = resources.files("newslens.resources").joinpath(f"{name}.txt").read_text("utf-8")
    terms = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            terms.add(unicodedata.normalize("NFKC", line).casefold())
    return frozenset(terms)


@dataclass(frozen=True)
class EntityMention:
    text: str
    start: int
    end: int  # exclusive

    def check_bounds(self, title: str) -> None:
        if not (0 <= self.start < self.end <= len(title)):
            raise ValueError(f"entity span [{self.start}, {self.end}) outside title of length {len(title)}")


def extract_entities(title: str, gazetteer: Sequence[str]) -> list[EntityMention]:
    """Exact gazetteer matches in the title, longest-first, non-overlapping."""
    taken: list[tuple[int, int]] = []
    mentions: list[EntityMention] = []
    for entry in sorted(gazetteer, key=lambda e: (-len(e), e)):
        if not entry:
            continue
        for match in re.finditer(re.escape(entry), title, flags=re.IGNORECASE):
            span = (match.start(), match.end())
            if all(span[1] <= s or span[0] >= e for s, e in taken):
                taken.append(span)
                mentions.append(EntityMention(text=match.group(0), start=span[0], end=span[1]))
    mentions.sort(key=lambda m: m.start)
    return mentions


class IncitementScorer(Protocol):
    def score_sentence(self, sentence: str) -> float: ...


class BiasScorer(Protocol):
    def classify_entity(self, title: str, entity: EntityMention) -> tuple[str, float]: ...


class SubjectivityScorer(Protocol):
    def sentence_is_quotation(self, sentence: str, previous: str | None) -> bool: ...
    def token_is_subjective(self, token: str) -> bool: ...


class SentimentScorer(Protocol):
    def score_text(self, text: str) -> float: ...


class LexiconIncitementScorer:
    """Share of title tokens found in the inciting-word list."""

    def __init__(self, lexicon: frozenset[str]):
        self.lexicon = lexicon

    def score_sentence(self, sentence: str) -> float:
        tokens = tokenize(sentence)
        if not tokens:
            return 0.0
        return sum(1 for t in tokens if t in self.lexicon) / len(tokens)


class LexiconBiasScorer:
    """Polarity of the title's sentiment words, attributed to its entities.

    Confidence is the margin between positive and negative hits over all
    sentiment hits; a balanced or sentiment-free title is neutral.
    """

    def __init__(self, positive: frozenset[str], negative: frozenset[str]):
        self.positive = positive
        self.negative = negative

    def classify_entity(self, title: str, entity: EntityMention) -> tuple[str, float]:
        tokens = tokenize(title)
        pos = sum(1 for t in tokens if t in self.positive)
        neg = sum(1 for t in tokens if t in self.negative)
        if pos == neg:
            return NEUTRAL, 0.0
        label = POSITIVE if pos > neg else NEGATIVE
        return label, abs(pos - neg) / (pos + neg)


class LexiconSubjectivityScorer:
    def __init__(self, subjective: frozenset[str], attribution: frozenset[str]):
        self.subjective = subjective
        self.attribution = attribution

    def sentence_is_quotation(self, sentence: str, previous: str | None) -> bool:
        for opening, closing in _QUOTE_PAIRS:
            if opening == closing:
                if sentence.count(opening) >= 2:
                    return True
            else:
                first = sentence.find(opening)
                if first != -1 and sentence.find(closing, first + 1) != -1:
                    return True
        if previous is not None:
            if any(t in self.attribution for t in tokenize(previous)):
                return True
        return False

    def token_is_subjective(self, token: str) -> bool:
        return token in self.subjective


class LexiconSentimentScorer:
    """(positive hits - negative hits) / token count, in [-1, 1]."""

    def __init__(self, positive: frozenset[str], negative: frozenset[str]):
        self.positive = positive
        self.negative = negative

    def score_text(self, text: str) -> float:
        tokens = tokenize(text)
        if not tokens:
            return 0.0
        pos = sum(1 for t in tokens if t in self.positive)
        neg = sum(1 for t in tokens if t in self.negative)
        return (pos - neg) / len(tokens)


@dataclass(frozen=True)
class ScorerSet:
    incitement: IncitementScorer
    bias: BiasScorer
    subjectivity: SubjectivityScorer
    sentiment: SentimentScorer
    gazetteer: tuple[str, ...]


@lru_cache(maxsize=1)
def default_scorers() -> ScorerSet:
    positive = load_lexicon("positive")
    negative = load_lexicon("negative")
    return ScorerSet(
        incitement=LexiconIncitementScorer(load_lexicon("incite")),
        bias=LexiconBiasScorer(positive, negative),
        subjectivity=LexiconSubjectivityScorer(load_lexicon("subjective"), load_lexicon("attribution")),
        sentiment=LexiconSentimentScorer(positive, negative),
        gazetteer=tuple(sorted(load_lexicon("gazetteer"))),
    )


def _clamp(value: float, lo: float, hi: float) -> float:
    return min(hi, max(lo, value))


def score_incitement(titles: Sequence[str], scorer: IncitementScorer) -> float:
    """Mean inciting score over the event's titles."""
    if not titles:
        raise ValueError("event has no titles")
    return _clamp(sum(scorer.score_sentence(t) for t in titles) / len(titles), 0.0, 1.0)


def score_bias(title: str, entities: Sequence[EntityMention], scorer: BiasScorer) -> float:
    """Mean confidence over non-neutral entity stances; 0.0 when none."""
    confidences = []
    for entity in entities:
        entity.check_bounds(title)
        label, confidence = scorer.classify_entity(title, entity)
        if label != NEUTRAL:
            confidences.append(_clamp(confidence, 0.0, 1.0))
    if not confidences:
        return 0.0
    return sum(confidences) / len(confidences)


def score_subjectivity(content: str, scorer: SubjectivityScorer) -> float:
    """Subjective-token share of the whole text, skipping quoted speech.

    Stage 1 marks quotation sentences; stage 2 counts subjective tokens in
    the remaining sentences. Quotation tokens stay in the denominator but
    can never reach the numerator.
    """
    if not content:
        raise ValueError("content must be non-empty")
    sentences = split_sentences(content)
    total = 0
    subjective = 0
    previous: str | None = None
    for sentence in sentences:
        tokens = tokenize(sentence)
        total += len(tokens)
        if not scorer.sentence_is_quotation(sentence, previous):
            subjective += sum(1 for t in tokens if scorer.token_is_subjective(t))
        previous = sentence
    if total == 0:
        return 0.0
    return _clamp(subjective / total, 0.0, 1.0)


def score_sentiment(text: str, scorer: SentimentScorer) -> float:
    if not text:
        return 0.0
    return _clamp(scorer.score_text(text), -1.0, 1.0)


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance over Unicode codepoints."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ch_a in enumerate(a, start=1):
        current = [i]
        for j, ch_b in enumerate(b, start=1):
            cost = 0 if ch_a == ch_b else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[-1]


def normalized_levenshtein(a: str, b: str) -> float:
    """Edit distance over the longer length; two empty strings match at 0.0."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return levenshtein(a, b) / longest


def _within_distance(a: str, b: str, max_edits: int) -> bool:
    """Banded check for levenshtein(a, b) <= max_edits, abandoning early."""
    if abs(len(a) - len(b)) > max_edits:
        return False
    if max_edits >= max(len(a), len(b)):
        return True
    if len(a) < len(b):
        a, b = b, a
    # Cells farther than max_edits from the diagonal cannot recover.
    previous = list(range(len(b) + 1))
    for i, ch_a in enumerate(a, start=1):
        lo = max(1, i - max_edits)
        hi = min(len(b), i + max_edits)
        current = [previous[0] + 1] + [max_edits + 1] * len(b)
        for j in range(lo, hi + 1):
            cost = 0 if ch_a == b[j - 1] else 1
            current[j] = min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost)
        if min(current[lo - 1:hi + 1]) > max_edits:
            return False
        previous = current
    return previous[-1] <= max_edits


def thread_matches_event(titles: Sequence[str], thread: DiscussionThread,
                         match_threshold: float = DEFAULT_MATCH_THRESHOLD) -> bool:
    post = thread.post_title
    for title in titles:
        longest = max(len(title), len(post))
        if longest == 0:
            return True
        # epsilon absorbs float error in t*len at integer boundaries
        if _within_distance(title, post, int(match_threshold * longest + 1e-9)):
            return True
    return False


@lru_cache(maxsize=64)
def _match_threads_cached(titles: tuple[str, ...], threads: tuple[DiscussionThread, ...],
                          match_threshold: float) -> tuple[DiscussionThread, ...]:
    return tuple(t for t in threads if thread_matches_event(titles, t, match_threshold))


def match_threads(titles: Sequence[str], threads: Sequence[DiscussionThread],
                  match_threshold: float = DEFAULT_MATCH_THRESHOLD) -> list[DiscussionThread]:
    # The analyze stage matches the same event against the same corpus for
    # popularity, community detection, and phrase scanning; cache the result.
    return list(_match_threads_cached(tuple(titles), tuple(threads), match_threshold))


def popularity(cluster: Sequence[Article], threads: Sequence[DiscussionThread],
               match_threshold: float = DEFAULT_MATCH_THRESHOLD) -> tuple[int, int]:
    """(article count, count of threads within the title-distance threshold)."""
    if not (0.0 <= match_threshold <= 1.0):
        raise ValueError("match_threshold must be in [0, 1]")
    titles = [a.title for a in cluster]
    return len(cluster), len(match_threads(titles, threads, match_threshold))


def compose_metrics(cluster: Sequence[Article], threads: Sequence[DiscussionThread],
                    scorers: ScorerSet,
                    suspicion_weights: Sequence[float] = DEFAULT_SUSPICION_WEIGHTS,
                    match_threshold: float = DEFAULT_MATCH_THRESHOLD) -> MetricScores:
    """Fill every metric for one event cluster.

    Factor scores are means over member articles; suspicion is the weighted
    mean of (incitement, bias, subjectivity) with weights normalized to sum 1.
    """
    if not cluster:
        raise ValueError("cannot score an empty event")
    titles = [a.title for a in cluster]
    incitement = score_incitement(titles, scorers.incitement)
    bias_scores = [
        score_bias(title, extract_entities(title, scorers.gazetteer), scorers.bias)
        for title in titles
    ]
    bias = sum(bias_scores) / len(bias_scores)
    subj_scores = [
        score_subjectivity(a.content, scorers.subjectivity) if a.content else 0.0
        for a in cluster
    ]
    subjectivity = sum(subj_scores) / len(subj_scores)
    sentiments = [score_sentiment(a.content, scorers.sentiment) for a in cluster]
    sentiment = sum(sentiments) / len(sentiments)

    weights = tuple(float(w) for w in suspicion_weights)
    if len(weights) != 3 or any(w < 0 for w in weights):
        raise ValueError("suspicion_weights must be three non-negative numbers")
    total = sum(weights) or 3.0
    if sum(weights) == 0:
        weights = (1.0, 1.0, 1.0)
    suspicion = (
        weights[0] * incitement + weights[1] * bias + weights[2] * subjectivity
    ) / total

    articles_count, discussions_count = popularity(cluster, threads, match_threshold)
    return MetricScores(
        incitement=_clamp(incitement, 0.0, 1.0),
        bias=_clamp(bias, 0.0, 1.0),
        subjectivity=_clamp(subjectivity, 0.0, 1.0),
        sentiment=_clamp(sentiment, -1.0, 1.0),
        suspicion=_clamp(suspicion, 0.0, 1.0),
        popularity_articles=articles_count,
        popularity_discussions=discussions_count,
    )
