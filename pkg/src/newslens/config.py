"""Run configuration: a single TOML file covering every pipeline stage.

Every key has a code default, so an empty (or missing) file is a valid
configuration. Unknown keys are rejected rather than ignored — silently
dropping a misspelled threshold is worse than failing the run.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .cluster import ClusterParams, WindowConfig
from .opinion import (
    DEFAULT_DENSITY_THRESHOLD,
    DEFAULT_MIN_COMMUNITY,
    DEFAULT_PHI_THRESHOLD,
    DEFAULT_PHRASE_N,
    DEFAULT_PHRASE_SUPPORT,
    Node2VecParams,
)


def _check_keys(section: str, raw: Mapping[str, Any], allowed: tuple[str, ...]) -> None:
    unknown = sorted(set(raw) - set(allowed))
    if unknown:
        raise ValueError(f"unknown config key(s) in [{section}]: {', '.join(unknown)}")


@dataclass(frozen=True)
class VectorizerConfig:
    min_df: int = 2
    title_weight: float = 2.0

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "VectorizerConfig":
        _check_keys("vectorizer", raw, ("min_df", "title_weight"))
        return cls(**raw)


@dataclass(frozen=True)
class ClusterConfig:
    t1: float = 0.55
    t2: float = 0.5
    window_hours: float = 72.0
    stride_hours: float = 8.0

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "ClusterConfig":
        _check_keys("cluster", raw, ("t1", "t2", "window_hours", "stride_hours"))
        return cls(**raw)

    def params(self) -> ClusterParams:
        return ClusterParams(t1=self.t1, t2=self.t2)

    def window(self) -> WindowConfig:
        return WindowConfig.from_hours(self.window_hours, self.stride_hours)


@dataclass(frozen=True)
class TagsConfig:
    method: str = "tfidf"
    k: int = 10

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "TagsConfig":
        _check_keys("tags", raw, ("method", "k"))
        config = cls(**raw)
        if config.method not in ("tfidf", "textrank"):
            raise ValueError("tags.method must be 'tfidf' or 'textrank'")
        if config.k < 1:
            raise ValueError("tags.k must be >= 1")
        return config


@dataclass(frozen=True)
class MetricsConfig:
    suspicion_weights: tuple[float, float, float] = (1.0, 1.0, 1.0)
    match_threshold: float = 0.3

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "MetricsConfig":
        _check_keys("metrics", raw, ("suspicion_weights", "match_threshold"))
        weights = raw.get("suspicion_weights")
        kwargs = dict(raw)
        if weights is not None:
            if len(weights) != 3:
                raise ValueError("metrics.suspicion_weights must have exactly 3 entries")
            kwargs["suspicion_weights"] = tuple(float(w) for w in weights)
        return cls(**kwargs)


@dataclass(frozen=True)
class OpinionConfig:
    phi_threshold: float = DEFAULT_PHI_THRESHOLD
    density_threshold: float = DEFAULT_DENSITY_THRESHOLD
    min_community: int = DEFAULT_MIN_COMMUNITY
    phrase_n: int = DEFAULT_PHRASE_N
    phrase_support: int = DEFAULT_PHRASE_SUPPORT
    embedding: Node2VecParams = field(default_factory=Node2VecParams)

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "OpinionConfig":
        allowed = ("phi_threshold", "density_threshold", "min_community",
                   "phrase_n", "phrase_support", "embedding")
        _check_keys("opinion", raw, allowed)
        kwargs = dict(raw)
        embedding = kwargs.pop("embedding", None)
        if embedding is not None:
            _check_keys("opinion.embedding", embedding, tuple(Node2VecParams.__dataclass_fields__))
            kwargs["embedding"] = Node2VecParams.from_dict(embedding)
        return cls(**kwargs)


@dataclass(frozen=True)
class ServerConfig:
    host: str = "127.0.0.1"
    port: int = 8764

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "ServerConfig":
        _check_keys("server", raw, ("host", "port"))
        return cls(**raw)


@dataclass(frozen=True)
class PipelineConfig:
    vectorizer: VectorizerConfig = field(default_factory=VectorizerConfig)
    cluster: ClusterConfig = field(default_factory=ClusterConfig)
    tags: TagsConfig = field(default_factory=TagsConfig)
    metrics: MetricsConfig = field(default_factory=MetricsConfig)
    opinion: OpinionConfig = field(default_factory=OpinionConfig)
    server: ServerConfig = field(default_factory=ServerConfig)

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "PipelineConfig":
        _check_keys("<root>", raw, tuple(f.name for f in fields(cls)))
        return cls(
            vectorizer=VectorizerConfig.from_dict(raw.get("vectorizer", {})),
            cluster=ClusterConfig.from_dict(raw.get("cluster", {})),
            tags=TagsConfig.from_dict(raw.get("tags", {})),
            metrics=MetricsConfig.from_dict(raw.get("metrics", {})),
            opinion=OpinionConfig.from_dict(raw.get("opinion", {})),
            server=ServerConfig.from_dict(raw.get("server", {})),
        )


def load_config(path: str | Path | None) -> PipelineConfig:
    """Parse a TOML config file; None means all defaults."""
    if path is None:
        return PipelineConfig()
    raw = tomllib.loads(Path(path).read_text("utf-8"))
    return PipelineConfig.from_dict(raw)


CONFIG_KEYS_DOC = """\
configuration keys (TOML; every key optional, defaults shown):
  [vectorizer]  min_df = 2               document-frequency floor for vocabulary terms
                title_weight = 2.0       multiplier on title token counts
  [cluster]     t1 = 0.55                cosine threshold for initial similarity balls
                t2 = 0.5                 overlap ratio above which clusters merge
                window_hours = 72        sliding window span
                stride_hours = 8         sliding window advance
  [tags]        method = "tfidf"         tag extractor: "tfidf" or "textrank"
                k = 10                   tags stored per event
  [metrics]     suspicion_weights = [1.0, 1.0, 1.0]
                                         weights for incitement, bias, subjectivity
                match_threshold = 0.3    max normalized edit distance thread<->event title
  [opinion]     phi_threshold = 0.6      min phi for a user-graph edge
                density_threshold = 0.7  flag communities at/above this edge density
                min_community = 4        smallest reportable community
                phrase_n = 4             bot-phrase n-gram length
                phrase_support = 3       comments needed before a phrase counts
  [opinion.embedding]
                dims = 64                embedding width
                walks_per_node = 10      random walks started from each node
                walk_length = 40         steps per walk
                return_p = 1.0           node2vec return parameter
                inout_q = 0.5            node2vec in-out parameter
                context_window = 5       skip-gram window
                epochs = 5               training passes over the walk corpus
                negative = 5             negative samples per pair
                learning_rate = 0.025    initial SGD step size
                seed = 0                 embedding RNG seed (CLI --seed overrides)
  [server]      host = "127.0.0.1"       bind address (env NEWSLENS_BIND=host:port overrides)
                port = 8764
"""
