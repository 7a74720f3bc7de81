"""Topic-model configuration and the coarse/medium/fine granularity presets.

Granularity is driven by ``n_neighbors`` (coarse=60, medium=35, fine=18):
fewer neighbors emphasize local structure and yield more, smaller topics.
The presets pin every other knob at the method's defaults and the whole
configuration is echoed into each export's run report.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, replace

DEFAULT_EMBEDDING = "tfidf-svd"  # built-in deterministic offline embedder


@dataclass(frozen=True)
class TopicModelConfig:
    n_neighbors: int = 35
    n_components: int = 5
    min_dist: float = 0.0
    min_cluster_size: int = 10
    min_samples: int = 10
    min_topic_size: int = 10
    random_seed: int = 42
    embedding_model_id: str = DEFAULT_EMBEDDING

    def __post_init__(self):
        if self.n_neighbors < 2:
            raise ValueError("n_neighbors must be >= 2")
        if self.n_components < 2:
            raise ValueError("n_components must be >= 2")
        if not 0.0 <= self.min_dist < 1.0:
            raise ValueError("min_dist must lie in [0, 1)")
        if self.min_cluster_size < 2:
            raise ValueError("min_cluster_size must be >= 2")
        if self.min_samples < 1:
            raise ValueError("min_samples must be >= 1")
        if self.min_topic_size < 2:
            raise ValueError("min_topic_size must be >= 2")

    def to_dict(self) -> dict:
        return asdict(self)


PRESETS = {
    "coarse": TopicModelConfig(n_neighbors=60),
    "medium": TopicModelConfig(n_neighbors=35),
    "fine": TopicModelConfig(n_neighbors=18),
}


def preset(name: str, seed: int | None = None, **overrides) -> TopicModelConfig:
    config = PRESETS[name]
    if seed is not None:
        config = replace(config, random_seed=seed)
    if overrides:
        config = replace(config, **overrides)
    return config
