"""Shared model-building helpers for the test suite."""
import numpy as np

from topicena.accumulate import AccumulatedModel, UnitSpec, pair_order_for
from topicena.topics import TopicInfo


def make_topics(k):
    return [TopicInfo(i, f"t{i}") for i in range(k)]


def make_model(vectors, groups=None, k_topics=None, normalization="none"):
    """AccumulatedModel straight from a vector matrix, one unit per row."""
    vectors = np.asarray(vectors, dtype=np.float64)
    n_pairs = vectors.shape[1]
    if k_topics is None:
        k_topics = 2
        while k_topics * (k_topics - 1) // 2 < n_pairs:
            k_topics += 1
    if k_topics * (k_topics - 1) // 2 != n_pairs:
        raise ValueError(f"{n_pairs} is not a K*(K-1)/2 pair count")
    topics = make_topics(k_topics)
    pair_order = pair_order_for(topics)
    unit_ids = [f"u{i}" for i in range(vectors.shape[0])]
    group_map = {}
    if groups is not None:
        group_map = {uid: g for uid, g in zip(unit_ids, groups) if g}
    return AccumulatedModel(
        unit_ids=unit_ids,
        vectors=vectors,
        topics=topics,
        pair_order=pair_order,
        groups=group_map,
        normalization=normalization,
        unit_spec=UnitSpec(),
    )


def sphere(vectors, groups=None, k_topics=None):
    """Sphere-normalized model from raw vectors (zero rows stay zero)."""
    vectors = np.asarray(vectors, dtype=np.float64)
    norms = np.linalg.norm(vectors, axis=1)
    out = vectors.copy()
    nz = norms > 0
    out[nz] = out[nz] / norms[nz, None]
    return make_model(out, groups=groups, k_topics=k_topics, normalization="sphere")
