"""Topic induction: neighbor-graph reduction, density clustering, c-TF-IDF.

The reducer is a spectral embedding of the k-nearest-neighbor graph, with
``n_neighbors`` playing its usual local-vs-global role; ``min_dist`` has no
effect on this reducer and is only echoed into the run report. Clusters come
from HDBSCAN; clusters smaller than ``min_topic_size`` are folded back into
the outlier pool. Soft topic probabilities are a normalized exponential decay
of distances to topic centroids in the reduced space, with outlier rows set
to zero so every row still aligns with the utterance table.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.cluster import HDBSCAN
from sklearn.feature_extraction.text import CountVectorizer
from sklearn.manifold import SpectralEmbedding

from .config import TopicModelConfig
from .errors import ClusteringCollapse

N_TOP_WORDS = 10


@dataclass
class TopicModelResult:
    labels: np.ndarray  # per-utterance topic id, -1 for outliers
    probabilities: np.ndarray  # (n, n_topics), rows in [0, 1]; outlier rows zero
    topics: list[dict]  # {topic_id, label, top_words, size}
    outlier_fraction: float
    effective: dict = field(default_factory=dict)  # clamped/derived parameters

    @property
    def n_topics(self) -> int:
        return len(self.topics)


def fit_topics(texts: list[str], embeddings: np.ndarray, config: TopicModelConfig) -> TopicModelResult:
    n = len(texts)
    reduced, effective = _reduce(embeddings, config)
    raw_labels = _cluster(reduced, config, n)
    labels, sizes = _apply_min_topic_size(raw_labels, config.min_topic_size)
    if not sizes:
        raise ClusteringCollapse("no cluster reached min_topic_size")

    # topic ids by descending size (ties by original cluster label)
    order = sorted(sizes, key=lambda lab: (-sizes[lab], lab))
    remap = {lab: tid for tid, lab in enumerate(order)}
    topic_of = np.array([remap.get(lab, -1) for lab in labels], dtype=np.int64)

    probabilities = _soft_memberships(reduced, topic_of, len(order))
    topics = _describe_topics(texts, topic_of, len(order))
    return TopicModelResult(
        labels=topic_of,
        probabilities=probabilities,
        topics=topics,
        outlier_fraction=float((topic_of == -1).mean()),
        effective=effective,
    )


def _reduce(embeddings: np.ndarray, config: TopicModelConfig):
    n = embeddings.shape[0]
    n_neighbors = min(config.n_neighbors, n - 1)
    n_components = min(config.n_components, max(1, n - 2))
    effective = {
        "n_neighbors": int(n_neighbors),
        "n_components": int(n_components),
        "min_dist": "unused by the spectral reducer",
    }
    if n_neighbors < 1 or n <= n_components:
        # tiny corpus: skip reduction entirely
        effective["reducer"] = "identity"
        return embeddings, effective
    effective["reducer"] = "spectral_knn"
    reducer = SpectralEmbedding(
        n_components=n_components,
        affinity="nearest_neighbors",
        n_neighbors=n_neighbors,
        random_state=config.random_seed,
    )
    with warnings.catch_warnings():
        # a disconnected kNN graph is expected at fine granularity
        warnings.filterwarnings("ignore", message="Graph is not fully connected")
        reduced = reducer.fit_transform(embeddings)
    return reduced, effective


def _cluster(reduced: np.ndarray, config: TopicModelConfig, n: int) -> np.ndarray:
    if config.min_cluster_size > n:
        raise ClusteringCollapse(
            f"min_cluster_size {config.min_cluster_size} exceeds corpus size {n}"
        )
    clusterer = HDBSCAN(
        min_cluster_size=config.min_cluster_size,
        min_samples=config.min_samples,
        allow_single_cluster=True,
    )
    try:
        labels = clusterer.fit_predict(reduced)
    except ValueError as exc:
        raise ClusteringCollapse(str(exc)) from exc
    if (labels == -1).all():
        raise ClusteringCollapse("every utterance was labeled an outlier")
    return labels


def _apply_min_topic_size(labels: np.ndarray, min_topic_size: int):
    sizes = {}
    for lab in np.unique(labels):
        if lab == -1:
            continue
        size = int((labels == lab).sum())
        if size >= min_topic_size:
            sizes[int(lab)] = size
    filtered = np.where(np.isin(labels, list(sizes)), labels, -1)
    return filtered, sizes


def _soft_memberships(reduced: np.ndarray, topic_of: np.ndarray, k: int) -> np.ndarray:
    n = reduced.shape[0]
    probabilities = np.zeros((n, k), dtype=np.float64)
    member = topic_of >= 0
    if k == 0 or not member.any():
        return probabilities
    centroids = np.vstack([
        reduced[topic_of == t].mean(axis=0) for t in range(k)
    ])
    distances = np.linalg.norm(reduced[:, None, :] - centroids[None, :, :], axis=2)
    nearest = distances[member].min(axis=1)
    scale = float(np.median(nearest))
    if scale <= 0.0:
        scale = 1.0
    raw = np.exp(-distances / scale)
    raw_sums = raw.sum(axis=1, keepdims=True)
    probabilities[member] = (raw / raw_sums)[member]
    return probabilities


def _describe_topics(texts: list[str], topic_of: np.ndarray, k: int) -> list[dict]:
    """Class-based TF-IDF: tf within the topic's pooled text, idf over topics."""
    class_docs = [
        " ".join(t for t, tid in zip(texts, topic_of) if tid == topic)
        for topic in range(k)
    ]
    vectorizer = CountVectorizer(lowercase=True, stop_words="english")
    try:
        counts = vectorizer.fit_transform(class_docs).toarray().astype(np.float64)
    except ValueError:
        counts = np.zeros((k, 0))
    vocabulary = vectorizer.get_feature_names_out() if counts.shape[1] else np.array([])

    topics = []
    seen_labels = set()
    if counts.shape[1]:
        row_totals = counts.sum(axis=1, keepdims=True)
        row_totals[row_totals == 0.0] = 1.0
        tf = counts / row_totals
        doc_freq = counts.sum(axis=0)
        average_words = counts.sum() / k
        idf = np.log(1.0 + average_words / doc_freq)
        scores = tf * idf
    for topic in range(k):
        if counts.shape[1]:
            top = np.argsort(-scores[topic], kind="stable")[:N_TOP_WORDS]
            words = [str(vocabulary[i]) for i in top if scores[topic][i] > 0.0]
        else:
            words = []
        label = ".".join(words[:2]) if len(words) >= 2 else (
            words[0] if words else f"topic{topic}"
        )
        if label in seen_labels:
            label = f"{label}.{topic}"
        seen_labels.add(label)
        topics.append(
            {
                "topic_id": topic,
                "label": label,
                "top_words": words,
                "size": int((topic_of == topic).sum()),
            }
        )
    return topics
