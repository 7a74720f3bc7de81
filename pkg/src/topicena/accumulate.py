"""Co-occurrence accumulation: coded utterances -> per-unit adjacency vectors.

Adjacency vectors are the flattened upper triangle of the code co-occurrence
matrix, in lexicographic pair order over topic_id. Accumulation is binary per
position: each unordered pair is counted at most once per line (or window
position), so counts are integers and order-free within a unit.

Window semantics, over rows grouped by conversation in table order:

- ``per_line``: a pair is counted at a line when both codes are active there.
- ``moving`` (width w >= 2): at line t, a pair (i, j) is counted when one code
  is active at t and the other is active anywhere in the w most recent lines
  of the same conversation (t inclusive). The count goes to the unit of line t.
- ``whole_conversation``: codes are OR-ed over a unit's lines within each
  conversation; every pair present in the OR counts once per conversation.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .corpus import Utterance
from .errors import EmptyGroup, EmptyUnitWarning, UnknownUtterance
from .topics import CodeMatrix, TopicInfo

WINDOWS = ("per_line", "moving", "whole_conversation")

# above this many pairs the dense per-pair path is dropped for a sparse one
_DENSE_PAIR_LIMIT = 4096


@dataclass(frozen=True)
class UnitSpec:
    unit_keys: tuple[str, ...] = ("doc_id",)
    conversation_keys: tuple[str, ...] = ("conversation_id",)
    window: str = "per_line"
    window_size: int | None = None

    def __post_init__(self):
        if not self.unit_keys:
            raise ValueError("unit_keys must be non-empty")
        if self.window not in WINDOWS:
            raise ValueError(f"window must be one of {WINDOWS}, got {self.window!r}")
        if self.window == "moving":
            if self.window_size is None or self.window_size < 2:
                raise ValueError("moving window requires window_size >= 2")
        elif self.window_size is not None:
            raise ValueError(f"window_size is only valid for moving, not {self.window}")

    def to_dict(self) -> dict:
        return {
            "unit_keys": list(self.unit_keys),
            "conversation_keys": list(self.conversation_keys),
            "window": self.window,
            "window_size": self.window_size,
        }


@dataclass(frozen=True)
class AdjacencyVector:
    unit_id: str
    values: np.ndarray  # (n_pairs,) non-negative


@dataclass
class AccumulatedModel:
    unit_ids: list[str]
    vectors: np.ndarray  # (n_units, n_pairs) float64
    topics: list[TopicInfo]
    pair_order: list[tuple[int, int]]  # (topic_id_i, topic_id_j), i < j
    groups: dict[str, str]  # unit_id -> group label (only grouped units)
    normalization: str = "none"
    zero_units: list[str] | None = None
    unit_spec: UnitSpec | None = None

    @property
    def n_units(self) -> int:
        return len(self.unit_ids)

    @property
    def n_pairs(self) -> int:
        return len(self.pair_order)

    def adjacency_vectors(self):
        for uid, row in zip(self.unit_ids, self.vectors):
            yield AdjacencyVector(uid, row)

    def unit_groups(self) -> np.ndarray:
        """Group label per unit row (None -> empty string)."""
        return np.array([self.groups.get(uid, "") for uid in self.unit_ids])


def pair_order_for(topics: list[TopicInfo]) -> list[tuple[int, int]]:
    ids = [t.topic_id for t in topics]
    return [(ids[i], ids[j]) for i in range(len(ids)) for j in range(i + 1, len(ids))]


def unit_id_of(utt: Utterance, unit_keys: tuple[str, ...]) -> str:
    values = [str(getattr(utt, key)) for key in unit_keys]
    return values[0] if len(values) == 1 else "|".join(values)


def _conversation_id_of(utt: Utterance, conversation_keys: tuple[str, ...]) -> str:
    values = [str(getattr(utt, key)) for key in conversation_keys]
    return values[0] if len(values) == 1 else "|".join(values)


def accumulate(
    codes: CodeMatrix,
    utterances: list[Utterance],
    spec: UnitSpec = UnitSpec(),
    group_field: str = "group",
) -> AccumulatedModel:
    """Accumulate pair co-occurrence counts per unit of analysis.

    The utterance table defines line order; code rows are joined on
    (doc_id, utterance_index). Utterances without a code row contribute
    all-zero codes (they still occupy window positions). A code row without
    an utterance raises UnknownUtterance. Unit group labels are read from
    ``group_field`` and must agree across a unit's utterances.
    """
    key_to_row = {key: i for i, key in enumerate(codes.keys)}
    if len(key_to_row) != len(codes.keys):
        raise ValueError("duplicate utterance keys in code matrix")
    known = {u.key for u in utterances}
    for key in codes.keys:
        if key not in known:
            raise UnknownUtterance(f"code row {key} has no utterance")

    n = len(utterances)
    n_topics = len(codes.topics)
    codes_by_line = np.zeros((n, n_topics), dtype=np.uint8)
    unit_ids_by_line: list[str] = []
    conv_ids_by_line: list[str] = []
    for i, utt in enumerate(utterances):
        row = key_to_row.get(utt.key)
        if row is not None:
            codes_by_line[i] = codes.values[row]
        unit_ids_by_line.append(unit_id_of(utt, spec.unit_keys))
        conv_ids_by_line.append(_conversation_id_of(utt, spec.conversation_keys))

    unit_order = sorted(set(unit_ids_by_line))
    unit_index = {uid: k for k, uid in enumerate(unit_order)}
    unit_idx = np.fromiter(
        (unit_index[uid] for uid in unit_ids_by_line), dtype=np.int64, count=n
    )

    # group rows by conversation, keeping table order within each conversation
    conv_order: dict[str, int] = {}
    for cid in conv_ids_by_line:
        conv_order.setdefault(cid, len(conv_order))
    conv_idx = np.fromiter(
        (conv_order[cid] for cid in conv_ids_by_line), dtype=np.int64, count=n
    )
    order = np.argsort(conv_idx, kind="stable")

    vectors = accumulate_counts(
        codes_by_line[order],
        unit_idx[order],
        conv_idx[order],
        n_units=len(unit_order),
        window=spec.window,
        window_size=spec.window_size,
    )

    groups: dict[str, str] = {}
    for utt, uid in zip(utterances, unit_ids_by_line):
        label = getattr(utt, group_field, None)
        if label is None:
            continue
        label = str(label)
        prior = groups.setdefault(uid, label)
        if prior != label:
            raise ValueError(
                f"unit {uid!r} carries conflicting group labels {prior!r} and {label!r}"
            )

    coded_units = set(unit_idx[codes_by_line.any(axis=1)].tolist())
    empty = [uid for uid in unit_order if unit_index[uid] not in coded_units]
    if empty:
        warnings.warn(
            f"{len(empty)} unit(s) have no coded lines, first: {empty[:3]}",
            EmptyUnitWarning,
            stacklevel=2,
        )

    return AccumulatedModel(
        unit_ids=unit_order,
        vectors=vectors,
        topics=list(codes.topics),
        pair_order=pair_order_for(codes.topics),
        groups=groups,
        normalization="none",
        unit_spec=spec,
    )


def accumulate_counts(
    codes: np.ndarray,
    unit_idx: np.ndarray,
    conv_idx: np.ndarray,
    n_units: int,
    window: str = "per_line",
    window_size: int | None = None,
) -> np.ndarray:
    """Array-level accumulation core.

    Rows must be ordered so conversations are contiguous and within-conversation
    order is temporal. Returns an (n_units, K*(K-1)/2) float64 matrix of
    integer-valued counts.
    """
    codes = np.ascontiguousarray(codes, dtype=np.uint8)
    n, n_topics = codes.shape
    pairs = [(i, j) for i in range(n_topics) for j in range(i + 1, n_topics)]
    out = np.zeros((n_units, len(pairs)), dtype=np.float64)
    if n == 0 or not pairs:
        return out

    if window == "per_line":
        if len(pairs) <= _DENSE_PAIR_LIMIT:
            for p, (i, j) in enumerate(pairs):
                both = (codes[:, i] & codes[:, j]).astype(np.float64)
                out[:, p] = np.bincount(unit_idx, weights=both, minlength=n_units)
        else:
            _sparse_per_line(codes, unit_idx, pairs, out)
        return out

    if window == "moving":
        w = int(window_size)
        starts = _segment_starts(conv_idx)
        conv_start = np.repeat(starts[:-1], np.diff(starts))
        pos = np.arange(n) - conv_start
        win_start = conv_start + np.maximum(0, pos - w + 1)
        if len(pairs) <= _DENSE_PAIR_LIMIT:
            cum = np.zeros((n + 1, n_topics), dtype=np.int64)
            np.cumsum(codes, axis=0, out=cum[1:])
            present = (cum[1:] - cum[win_start]) > 0
            for p, (i, j) in enumerate(pairs):
                hit = (codes[:, i].astype(bool) & present[:, j]) | (
                    codes[:, j].astype(bool) & present[:, i]
                )
                out[:, p] = np.bincount(
                    unit_idx, weights=hit.astype(np.float64), minlength=n_units
                )
        else:
            _sparse_moving(codes, unit_idx, win_start, pairs, out)
        return out

    if window == "whole_conversation":
        # OR codes per (unit, conversation) block, then count each present pair once
        block_key = unit_idx.astype(np.int64) * (conv_idx.max() + 1) + conv_idx
        _, block_first, block_id = np.unique(
            block_key, return_index=True, return_inverse=True
        )
        block_id = block_id.reshape(-1)
        n_blocks = block_first.size
        present = np.zeros((n_blocks, n_topics), dtype=bool)
        for k in range(n_topics):
            present[:, k] = (
                np.bincount(block_id, weights=codes[:, k].astype(np.float64),
                            minlength=n_blocks) > 0
            )
        block_unit = unit_idx[block_first]
        # block_first from np.unique indexes the original rows of each block
        if len(pairs) <= _DENSE_PAIR_LIMIT:
            for p, (i, j) in enumerate(pairs):
                both = (present[:, i] & present[:, j]).astype(np.float64)
                out[:, p] = np.bincount(block_unit, weights=both, minlength=n_units)
        else:
            pair_index = {pair: p for p, pair in enumerate(pairs)}
            for b in range(n_blocks):
                active = np.flatnonzero(present[b])
                u = block_unit[b]
                for a in range(len(active)):
                    for c in range(a + 1, len(active)):
                        out[u, pair_index[(active[a], active[c])]] += 1.0
        return out

    raise ValueError(f"unknown window {window!r}")


def _segment_starts(conv_idx: np.ndarray) -> np.ndarray:
    """Offsets of conversation segments in a conversation-contiguous row order."""
    n = conv_idx.shape[0]
    boundaries = np.flatnonzero(np.diff(conv_idx) != 0) + 1
    return np.concatenate(([0], boundaries, [n]))


def _sparse_per_line(codes, unit_idx, pairs, out) -> None:
    pair_index = {pair: p for p, pair in enumerate(pairs)}
    for r in range(codes.shape[0]):
        active = np.flatnonzero(codes[r])
        u = unit_idx[r]
        for a in range(len(active)):
            for b in range(a + 1, len(active)):
                out[u, pair_index[(active[a], active[b])]] += 1.0


def _sparse_moving(codes, unit_idx, win_start, pairs, out) -> None:
    pair_index = {pair: p for p, pair in enumerate(pairs)}
    active_rows = [np.flatnonzero(codes[r]) for r in range(codes.shape[0])]
    for r in range(codes.shape[0]):
        here = active_rows[r]
        if here.size == 0:
            continue
        window_codes: set[int] = set()
        for q in range(win_start[r], r + 1):
            window_codes.update(active_rows[q].tolist())
        hit = set()
        for i in here:
            for j in window_codes:
                if i != j:
                    hit.add((min(i, j), max(i, j)))
        u = unit_idx[r]
        for pair in hit:
            out[u, pair_index[pair]] += 1.0


def normalize_sphere(model: AccumulatedModel) -> AccumulatedModel:
    """Scale each unit vector to Euclidean norm 1; zero vectors stay zero."""
    if model.normalization != "none":
        raise ValueError(f"model is already normalized ({model.normalization})")
    norms = np.linalg.norm(model.vectors, axis=1)
    zero = norms == 0.0
    scaled = model.vectors.copy()
    scaled[~zero] = scaled[~zero] / norms[~zero, None]
    return replace(
        model,
        vectors=scaled,
        normalization="sphere",
        zero_units=[uid for uid, z in zip(model.unit_ids, zero) if z],
    )


def group_mean_vector(model: AccumulatedModel, group: str) -> np.ndarray:
    """Arithmetic mean of the adjacency vectors of the group's units."""
    mask = np.array([model.groups.get(uid) == group for uid in model.unit_ids])
    if not mask.any():
        raise EmptyGroup(f"no unit carries group label {group!r}")
    return model.vectors[mask].mean(axis=0)


# ---------------------------------------------------------------------------
# interchange file


def write_accumulated_model(model: AccumulatedModel, path) -> None:
    payload = {
        "schema_version": 1,
        "topics": [
            {"topic_id": t.topic_id, "label": t.label, "top_words": list(t.top_words)}
            for t in model.topics
        ],
        "pair_order": [list(p) for p in model.pair_order],
        "normalization": model.normalization,
        "unit_spec": model.unit_spec.to_dict() if model.unit_spec else None,
        "zero_units": model.zero_units,
        "units": [
            {
                "unit_id": uid,
                "group": model.groups.get(uid),
                "values": [float(v) for v in row],
            }
            for uid, row in zip(model.unit_ids, model.vectors)
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")


def read_accumulated_model(path) -> AccumulatedModel:
    with open(Path(path), encoding="utf-8") as fh:
        payload = json.load(fh)
    topics = [
        TopicInfo(t["topic_id"], t["label"], tuple(t.get("top_words", ())))
        for t in payload["topics"]
    ]
    units = payload["units"]
    spec = payload.get("unit_spec")
    return AccumulatedModel(
        unit_ids=[u["unit_id"] for u in units],
        vectors=np.array([u["values"] for u in units], dtype=np.float64).reshape(
            len(units), len(payload["pair_order"])
        ),
        topics=topics,
        pair_order=[tuple(p) for p in payload["pair_order"]],
        groups={u["unit_id"]: u["group"] for u in units if u.get("group")},
        normalization=payload["normalization"],
        zero_units=payload.get("zero_units"),
        unit_spec=UnitSpec(
            unit_keys=tuple(spec["unit_keys"]),
            conversation_keys=tuple(spec["conversation_keys"]),
            window=spec["window"],
            window_size=spec["window_size"],
        )
        if spec
        else None,
    )
