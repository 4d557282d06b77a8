"""Tokenization and tf-idf document vectors for cosine similarity.

The clustering stage only consumes pairwise cosine values, so any embedder
producing L2-normalized sparse vectors can stand in; this module ships the
deterministic default. CJK text is tokenized as overlapping character
bigrams, everything else as lowercase alphanumeric runs.
"""

from __future__ import annotations

import math
import unicodedata
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .records import Article

DEFAULT_MIN_DF = 2
DEFAULT_TITLE_WEIGHT = 2.0

_CJK_RANGES = (
    (0x1100, 0x11FF),    # Hangul Jamo
    (0x2E80, 0x2FDF),    # CJK radicals
    (0x3040, 0x30FF),    # Hiragana, Katakana
    (0x3130, 0x318F),    # Hangul compatibility Jamo
    (0x3400, 0x4DBF),    # CJK extension A
    (0x4E00, 0x9FFF),    # CJK unified ideographs
    (0xAC00, 0xD7AF),    # Hangul syllables
    (0xF900, 0xFAFF),    # CJK compatibility ideographs
    (0x20000, 0x2FA1F),  # CJK extensions B+
)


def _is_cjk(ch: str) -> bool:
    code = ord(ch)
    return any(lo <= code <= hi for lo, hi in _CJK_RANGES)


def tokenize(text: str) -> list[str]:
    """Split text into normalized terms.

    NFKC + casefold is applied exactly once. Contiguous CJK runs emit
    overlapping character bigrams (a lone CJK character emits itself);
    other alphanumeric runs emit whole words; punctuation and whitespace
    separate. Empty input yields an empty list.
    """
    normalized = unicodedata.normalize("NFKC", text).casefold()
    tokens: list[str] = []
    word: list[str] = []
    cjk: list[str] = []

    def flush_word():
        if word:
            tokens.append("".join(word))
            word.clear()

    def flush_cjk():
        if len(cjk) == 1:
            tokens.append(cjk[0])
        elif cjk:
            tokens.extend(cjk[i] + cjk[i + 1] for i in range(len(cjk) - 1))
        cjk.clear()

    for ch in normalized:
        if _is_cjk(ch):
            flush_word()
            cjk.append(ch)
        elif ch.isalnum():
            flush_cjk()
            word.append(ch)
        else:
            flush_word()
            flush_cjk()
    flush_word()
    flush_cjk()
    return tokens


@dataclass(frozen=True)
class VectorizerModel:
    """Immutable fitted vocabulary with smoothed idf weights."""

    vocabulary: dict[str, int]  # term -> dense dimension index
    idf: np.ndarray             # idf[index] >= 0
    corpus_size: int

    def idf_of(self, term: str) -> float | None:
        index = self.vocabulary.get(term)
        return None if index is None else float(self.idf[index])


@dataclass(frozen=True)
class DocVector:
    """Sparse L2-normalized term-weight vector."""

    weights: dict[int, float]

    @property
    def is_zero(self) -> bool:
        return not self.weights

    @property
    def norm(self) -> float:
        return 0.0 if not self.weights else 1.0


def fit(corpus: Sequence[Article], min_df: int = DEFAULT_MIN_DF) -> VectorizerModel:
    """Fit vocabulary and idf over title+content of every article.

    Terms below the document-frequency floor are excluded. idf follows the
    smoothed form ln((1 + N) / (1 + df)) + 1, which is >= 0 everywhere.
    """
    if not corpus:
        raise ValueError("cannot fit a vectorizer on an empty corpus")
    df: Counter[str] = Counter()
    for article in corpus:
        df.update(set(tokenize(article.title)) | set(tokenize(article.content)))
    terms = sorted(t for t, count in df.items() if count >= min_df)
    vocabulary = {term: idx for idx, term in enumerate(terms)}
    size = len(corpus)
    idf = np.array(
        [math.log((1 + size) / (1 + df[term])) + 1.0 for term in terms], dtype=np.float64
    )
    return VectorizerModel(vocabulary=vocabulary, idf=idf, corpus_size=size)


def _normalize(weights: dict[int, float]) -> dict[int, float]:
    norm = math.sqrt(sum(w * w for w in weights.values()))
    if norm <= 0.0:
        return {}
    return {idx: w / norm for idx, w in weights.items()}


def vector_from_counts(model: VectorizerModel, counts: Counter) -> DocVector:
    weights: dict[int, float] = {}
    for term, count in counts.items():
        index = model.vocabulary.get(term)
        if index is not None and count > 0:
            weights[index] = count * float(model.idf[index])
    return DocVector(weights=_normalize(weights))


def embed(model: VectorizerModel, article: Article,
          title_weight: float = DEFAULT_TITLE_WEIGHT) -> DocVector:
    """tf-idf vector over content tokens plus up-weighted title tokens.

    Out-of-vocabulary tokens are dropped; an article with no in-vocabulary
    token embeds to the zero vector (DocVector.is_zero).
    """
    counts: Counter = Counter(tokenize(article.content))
    for term, count in Counter(tokenize(article.title)).items():
        counts[term] += title_weight * count
    return vector_from_counts(model, counts)


def cosine(a: DocVector, b: DocVector) -> float:
    """Dot product of normalized vectors, clamped to [0, 1]; zero vector -> 0."""
    if a.is_zero or b.is_zero:
        return 0.0
    small, large = (a.weights, b.weights) if len(a.weights) <= len(b.weights) else (b.weights, a.weights)
    dot = sum(w * large.get(idx, 0.0) for idx, w in small.items())
    return min(1.0, max(0.0, dot))


def pairwise_cosines(vectors: Sequence[DocVector]) -> np.ndarray:
    """Symmetric n x n cosine matrix via an inverted term index.

    Diagonal is 1 for non-zero vectors, 0 for zero vectors.
    """
    n = len(vectors)
    sims = np.zeros((n, n), dtype=np.float64)
    postings: dict[int, list[tuple[int, float]]] = {}
    for doc_index, vec in enumerate(vectors):
        for dim, weight in vec.weights.items():
            postings.setdefault(dim, []).append((doc_index, weight))
    for entries in postings.values():
        for pos, (i, wi) in enumerate(entries):
            for j, wj in entries[pos + 1:]:
                sims[i, j] += wi * wj
    sims += sims.T
    np.clip(sims, 0.0, 1.0, out=sims)
    for doc_index, vec in enumerate(vectors):
        sims[doc_index, doc_index] = 0.0 if vec.is_zero else 1.0
    return sims
