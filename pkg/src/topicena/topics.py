"""Topic-probability ingestion, threshold coding, and coding diagnostics.

The inclusion rule is a strict greater-than: a topic counts as present in an
utterance when its probability exceeds the threshold. Equality is excluded,
so `threshold=1.0` codes nothing and `threshold=0.0` codes every strictly
positive entry.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .corpus import Utterance
from .errors import DimensionMismatch, ParseError
from .validation import check_probability_matrix, check_threshold

UtteranceKey = tuple[str, int]


@dataclass(frozen=True)
class TopicInfo:
    topic_id: int
    label: str
    top_words: tuple[str, ...] = ()

    def __post_init__(self):
        if self.topic_id < 0:
            raise ValueError(
                f"topic_id must be >= 0 (outlier topics are excluded upstream), got {self.topic_id}"
            )
        if not self.label:
            raise ValueError("topic label must be non-empty")


@dataclass
class TopicProbabilityMatrix:
    keys: list[UtteranceKey]
    topics: list[TopicInfo]
    values: np.ndarray  # (n_utterances, n_topics) float64 in [0, 1]

    def __post_init__(self):
        self.values = check_probability_matrix(self.values)
        if self.values.shape != (len(self.keys), len(self.topics)):
            raise ValueError(
                f"values shape {self.values.shape} does not match "
                f"{len(self.keys)} keys x {len(self.topics)} topics"
            )
        ids = [t.topic_id for t in self.topics]
        if sorted(set(ids)) != ids:
            raise ValueError("topics must be unique and sorted by topic_id")


@dataclass
class CodeMatrix:
    keys: list[UtteranceKey]
    topics: list[TopicInfo]
    values: np.ndarray  # (n_utterances, n_topics) uint8
    threshold_used: float

    @property
    def labels(self) -> list[str]:
        return [t.label for t in self.topics]


@dataclass
class DiagnosticsReport:
    n_rows: int
    n_topics: int
    codes_per_row_min: float
    codes_per_row_mean: float
    codes_per_row_max: float
    zero_row_fraction: float
    topic_counts: list[int] = field(default_factory=list)
    all_rows_zero: bool = False

    def to_dict(self) -> dict:
        return {
            "n_rows": self.n_rows,
            "n_topics": self.n_topics,
            "codes_per_row": {
                "min": self.codes_per_row_min,
                "mean": self.codes_per_row_mean,
                "max": self.codes_per_row_max,
            },
            "zero_row_fraction": self.zero_row_fraction,
            "topic_counts": self.topic_counts,
            "all_rows_zero": self.all_rows_zero,
        }


class InclusionEncoder(TransformerMixin, BaseEstimator):
    """Binary multi-topic coder over a probability matrix.

    transform(X) marks entry (u, t) as 1 exactly when X[u, t] > threshold.
    Probabilities are never renormalized and all-zero rows are legal output.
    """

    def __init__(self, threshold: float = 0.05):
        self.threshold = threshold

    def fit(self, X, y=None):
        check_threshold(self.threshold)
        X = check_probability_matrix(X)
        self.n_topics_ = X.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "n_topics_")
        X = check_probability_matrix(X)
        if X.shape[1] != self.n_topics_:
            raise DimensionMismatch(
                f"expected {self.n_topics_} topic columns, got {X.shape[1]}"
            )
        return (X > self.threshold).astype(np.uint8)


def encode_inclusion(probs: TopicProbabilityMatrix, threshold: float) -> CodeMatrix:
    """Apply the strict inclusion threshold to a probability matrix."""
    encoder = InclusionEncoder(threshold=check_threshold(threshold))
    codes = encoder.fit(probs.values).transform(probs.values)
    return CodeMatrix(
        keys=list(probs.keys),
        topics=list(probs.topics),
        values=codes,
        threshold_used=float(threshold),
    )


def coding_diagnostics(codes: CodeMatrix) -> DiagnosticsReport:
    """Row/topic coding statistics: the quantities threshold tuning reasons about."""
    values = codes.values
    if values.shape[0] == 0:
        raise ValueError("code matrix must be non-empty")
    per_row = values.sum(axis=1)
    zero_fraction = float((per_row == 0).mean())
    return DiagnosticsReport(
        n_rows=int(values.shape[0]),
        n_topics=int(values.shape[1]),
        codes_per_row_min=float(per_row.min()),
        codes_per_row_mean=float(per_row.mean()),
        codes_per_row_max=float(per_row.max()),
        zero_row_fraction=zero_fraction,
        topic_counts=[int(c) for c in values.sum(axis=0)],
        all_rows_zero=zero_fraction == 1.0,
    )


def threshold_sweep(
    probs: TopicProbabilityMatrix, thresholds: list[float]
) -> list[tuple[float, DiagnosticsReport]]:
    """Diagnostics at each threshold of an ascending sweep."""
    if list(thresholds) != sorted(thresholds):
        raise ValueError("thresholds must be sorted ascending")
    return [
        (float(t), coding_diagnostics(encode_inclusion(probs, t))) for t in thresholds
    ]


# ---------------------------------------------------------------------------
# interchange files


def load_topic_metadata(path) -> list[TopicInfo]:
    """Read the topic metadata JSON array, sorted by topic_id."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", path, exc.lineno) from exc
    if not isinstance(raw, list):
        raise ParseError("topic metadata must be a JSON array", path)
    topics = []
    for entry in raw:
        if int(entry["topic_id"]) < 0:
            raise ParseError(
                f"outlier topic id {entry['topic_id']} must not appear in metadata", path
            )
        topics.append(
            TopicInfo(
                topic_id=int(entry["topic_id"]),
                label=str(entry["label"]),
                top_words=tuple(entry.get("top_words", ())),
            )
        )
    topics.sort(key=lambda t: t.topic_id)
    ids = [t.topic_id for t in topics]
    if len(set(ids)) != len(ids):
        raise ParseError("duplicate topic_id in metadata", path)
    labels = [t.label for t in topics]
    if len(set(labels)) != len(labels):
        raise ParseError("duplicate topic label in metadata", path)
    return topics


def write_topic_metadata(topics: list[TopicInfo], path) -> None:
    payload = [
        {"topic_id": t.topic_id, "label": t.label, "top_words": list(t.top_words)}
        for t in sorted(topics, key=lambda t: t.topic_id)
    ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")


def load_topic_probabilities(
    path, topics: list[TopicInfo], utterances: list[Utterance] | None = None
) -> TopicProbabilityMatrix:
    """Read a probability CSV whose columns are topic labels.

    Columns may appear in any order; they are reordered to ascending topic_id.
    When an utterance table is supplied, every row key must refer to it.
    """
    path = Path(path)
    frame = pd.read_csv(path, dtype={"doc_id": str}, float_precision="round_trip")
    for col in ("doc_id", "utterance_index"):
        if col not in frame.columns:
            raise ParseError(f"missing required column {col!r}", path, line=1)
    labels = [t.label for t in topics]
    file_labels = [c for c in frame.columns if c not in ("doc_id", "utterance_index")]
    if sorted(file_labels) != sorted(labels):
        raise ParseError(
            f"topic columns {sorted(file_labels)} do not match metadata labels {sorted(labels)}",
            path,
            line=1,
        )
    values = frame[labels].to_numpy(dtype=np.float64)
    bad = ~((values >= 0.0) & (values <= 1.0))
    if bad.any():
        row = int(np.argwhere(bad)[0][0])
        raise ParseError(
            f"probability outside [0, 1] in data row {row + 1}", path, line=row + 2
        )
    keys = list(zip(frame["doc_id"], frame["utterance_index"].astype(int)))
    if len(set(keys)) != len(keys):
        raise ParseError("duplicate (doc_id, utterance_index) key", path)
    if utterances is not None:
        known = {u.key for u in utterances}
        missing = [k for k in keys if k not in known]
        if missing:
            raise ParseError(
                f"{len(missing)} row keys missing from the utterance table, "
                f"first {missing[0]}",
                path,
            )
    return TopicProbabilityMatrix(keys=keys, topics=list(topics), values=values)


def _write_key_matrix_csv(keys, labels, values, path, fmt) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(["doc_id", "utterance_index"] + list(labels)) + "\n")
        for (doc_id, idx), row in zip(keys, values):
            fh.write(",".join([str(doc_id), str(int(idx))] + [fmt(v) for v in row]) + "\n")


def write_topic_probabilities(probs: TopicProbabilityMatrix, path) -> None:
    _write_key_matrix_csv(
        probs.keys, [t.label for t in probs.topics], probs.values, path,
        lambda v: repr(float(v)),
    )


def write_code_matrix(codes: CodeMatrix, path, sidecar_path=None) -> None:
    """Write the binary code CSV plus the threshold sidecar JSON."""
    path = Path(path)
    _write_key_matrix_csv(
        codes.keys, codes.labels, codes.values, path, lambda v: str(int(v))
    )
    if sidecar_path is None:
        sidecar_path = path.with_suffix(".threshold.json")
    with open(sidecar_path, "w", encoding="utf-8") as fh:
        json.dump({"threshold_used": codes.threshold_used}, fh, sort_keys=True)
        fh.write("\n")


def read_code_matrix(path, topics: list[TopicInfo], sidecar_path=None) -> CodeMatrix:
    path = Path(path)
    if sidecar_path is None:
        sidecar_path = path.with_suffix(".threshold.json")
    frame = pd.read_csv(path, dtype={"doc_id": str})
    labels = [t.label for t in topics]
    values = frame[labels].to_numpy()
    if not np.isin(values, (0, 1)).all():
        raise ParseError("code matrix values must be binary", path)
    with open(sidecar_path, encoding="utf-8") as fh:
        threshold = float(json.load(fh)["threshold_used"])
    keys = list(zip(frame["doc_id"], frame["utterance_index"].astype(int)))
    return CodeMatrix(
        keys=keys,
        topics=list(topics),
        values=values.astype(np.uint8),
        threshold_used=threshold,
    )
