"""Group mean networks, subtraction networks, and node co-registration.

Node positions are chosen so each unit's weighted centroid of edge midpoints
lands as close as possible (least squares) to that unit's projected point,
putting network plots and unit points in one shared space. A small ridge term
keeps the solve well-posed when topics have no incident edge mass; such
isolated nodes sit at the origin and are flagged.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .accumulate import AccumulatedModel, group_mean_vector
from .errors import AllUnitsEmpty, NodeSetMismatch
from .projection import ProjectionModel, UnitPoint
from .topics import TopicInfo
from .validation import check_weight_matrix, midranks

RIDGE = 1e-8


@dataclass
class NetworkGraph:
    kind: str  # "group_mean" | "subtraction"
    topics: list[TopicInfo]
    pair_order: list[tuple[int, int]]
    weights: np.ndarray  # (n_pairs,); may be negative for subtraction
    group: str | None = None
    groups_compared: tuple[str, str] | None = None

    def node_strength(self) -> dict[int, float]:
        """Sum of incident edge weights per topic (signed for subtraction)."""
        strength = {t.topic_id: 0.0 for t in self.topics}
        for (i, j), w in zip(self.pair_order, self.weights):
            strength[i] += float(w)
            strength[j] += float(w)
        return strength

    def l1_mass(self) -> float:
        return float(np.abs(self.weights).sum())


@dataclass
class NodeLayout:
    topic_ids: list[int]
    positions: np.ndarray  # (n_topics, d)
    pearson: np.ndarray  # (d,) correlation of points vs centroids; NaN if degenerate
    spearman: np.ndarray
    isolated: list[int]  # topic ids with no incident edge mass

    def position_of(self, topic_id: int) -> np.ndarray:
        return self.positions[self.topic_ids.index(topic_id)]


def group_mean_network(model: AccumulatedModel, group: str) -> NetworkGraph:
    """Network whose edge weights are the group mean adjacency vector."""
    return NetworkGraph(
        kind="group_mean",
        topics=list(model.topics),
        pair_order=list(model.pair_order),
        weights=group_mean_vector(model, group),
        group=group,
    )


def subtract_network(a: NetworkGraph, b: NetworkGraph) -> NetworkGraph:
    """Edge-wise a - b; positive edges belong to a's group, negative to b's."""
    if a.kind != "group_mean" or b.kind != "group_mean":
        raise ValueError("subtraction is defined over group_mean graphs")
    if [t.topic_id for t in a.topics] != [t.topic_id for t in b.topics]:
        raise NodeSetMismatch("graphs have different node sets")
    if a.pair_order != b.pair_order:
        raise NodeSetMismatch("graphs have different pair orders")
    return NetworkGraph(
        kind="subtraction",
        topics=list(a.topics),
        pair_order=list(a.pair_order),
        weights=a.weights - b.weights,
        groups_compared=(a.group or "", b.group or ""),
    )


class NodeLayoutSolver(BaseEstimator):
    """Per-dimension linear least squares for co-registered node positions.

    fit(W, P) minimizes sum_u || P_u - centroid_u(X) ||^2 over node positions
    X, where centroid_u is the unit's weight-normalized mean of edge midpoints.
    Units with zero total weight are excluded from the objective.
    """

    def __init__(self, n_topics: int, pair_columns: list[tuple[int, int]] | None = None,
                 ridge: float = RIDGE):
        self.n_topics = n_topics
        self.pair_columns = pair_columns
        self.ridge = ridge

    def _pairs(self) -> list[tuple[int, int]]:
        if self.pair_columns is not None:
            return self.pair_columns
        k = self.n_topics
        return [(i, j) for i in range(k) for j in range(i + 1, k)]

    def _midpoint_matrix(self, W: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        totals = W.sum(axis=1)
        include = totals > 0
        if not include.any():
            raise AllUnitsEmpty("every unit has a zero adjacency vector")
        Wn = W[include] / totals[include, None]
        A = np.zeros((Wn.shape[0], self.n_topics), dtype=np.float64)
        for p, (i, j) in enumerate(self._pairs()):
            A[:, i] += 0.5 * Wn[:, p]
            A[:, j] += 0.5 * Wn[:, p]
        return A, include

    def fit(self, W, P):
        W = check_weight_matrix(W)
        P = np.asarray(P, dtype=np.float64)
        if P.ndim != 2 or P.shape[0] != W.shape[0]:
            raise ValueError(
                f"points shape {P.shape} does not match {W.shape[0]} units"
            )
        A, include = self._midpoint_matrix(W)
        # ridge-augmented least squares; QR/SVD path avoids squaring the
        # condition number the way explicit normal equations would
        augmented = np.vstack([A, np.sqrt(self.ridge) * np.eye(self.n_topics)])
        rhs = np.vstack([P[include], np.zeros((self.n_topics, P.shape[1]))])
        self.positions_, *_ = np.linalg.lstsq(augmented, rhs, rcond=None)
        self.included_ = include
        self.isolated_ = np.flatnonzero(A.sum(axis=0) == 0.0).tolist()

        centroids = A @ self.positions_
        target = P[include]
        d = P.shape[1]
        self.pearson_ = np.array(
            [_pearson(target[:, k], centroids[:, k]) for k in range(d)]
        )
        self.spearman_ = np.array(
            [_pearson(midranks(target[:, k]), midranks(centroids[:, k])) for k in range(d)]
        )
        self._A = A
        self._target = target
        return self

    def objective(self, positions=None) -> float:
        """Sum of squared residuals (ridge excluded) at the given positions."""
        check_is_fitted(self, "positions_")
        X = self.positions_ if positions is None else np.asarray(positions)
        return float(((self._target - self._A @ X) ** 2).sum())


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.sqrt((xc**2).sum() * (yc**2).sum())
    if denom == 0.0:
        return float("nan")
    return float((xc * yc).sum() / denom)


def optimize_node_positions(
    model: AccumulatedModel,
    points: list[UnitPoint],
    projection: ProjectionModel,
) -> NodeLayout:
    """Solve node positions against the unit points of a fitted projection."""
    if len(points) != model.n_units:
        raise ValueError("one point per unit is required")
    by_unit = {pt.unit_id: pt for pt in points}
    P = np.vstack([by_unit[uid].coords for uid in model.unit_ids])
    col = {t.topic_id: k for k, t in enumerate(model.topics)}
    solver = NodeLayoutSolver(
        n_topics=len(model.topics),
        pair_columns=[(col[i], col[j]) for (i, j) in model.pair_order],
    )
    solver.fit(model.vectors, P)
    return NodeLayout(
        topic_ids=[t.topic_id for t in model.topics],
        positions=solver.positions_,
        pearson=solver.pearson_,
        spearman=solver.spearman_,
        isolated=[model.topics[k].topic_id for k in solver.isolated_],
    )


# ---------------------------------------------------------------------------
# interchange file


def _nan_to_none(value: float):
    return None if np.isnan(value) else float(value)


def write_network(graph: NetworkGraph, path, layout: NodeLayout | None = None) -> None:
    strength = graph.node_strength()
    payload = {
        "schema_version": 1,
        "kind": graph.kind,
        "group": graph.group,
        "groups_compared": list(graph.groups_compared)
        if graph.groups_compared
        else None,
        "nodes": [
            {
                "topic_id": t.topic_id,
                "label": t.label,
                "strength": float(strength[t.topic_id]),
            }
            for t in graph.topics
        ],
        "edges": [
            {"i": int(i), "j": int(j), "weight": float(w)}
            for (i, j), w in zip(graph.pair_order, graph.weights)
        ],
        "layout": {
            "positions": [
                {"topic_id": tid, "coords": [float(v) for v in row]}
                for tid, row in zip(layout.topic_ids, layout.positions)
            ],
            "fit": {
                "pearson": [_nan_to_none(v) for v in layout.pearson],
                "spearman": [_nan_to_none(v) for v in layout.spearman],
            },
            "isolated": layout.isolated,
        }
        if layout is not None
        else None,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")


def read_network(path) -> tuple[NetworkGraph, NodeLayout | None]:
    with open(Path(path), encoding="utf-8") as fh:
        payload = json.load(fh)
    topics = [
        TopicInfo(n["topic_id"], n["label"]) for n in payload["nodes"]
    ]
    graph = NetworkGraph(
        kind=payload["kind"],
        topics=topics,
        pair_order=[(e["i"], e["j"]) for e in payload["edges"]],
        weights=np.array([e["weight"] for e in payload["edges"]], dtype=np.float64),
        group=payload.get("group"),
        groups_compared=tuple(payload["groups_compared"])
        if payload.get("groups_compared")
        else None,
    )
    layout = None
    raw = payload.get("layout")
    if raw is not None:
        def _none_to_nan(values):
            return np.array(
                [np.nan if v is None else v for v in values], dtype=np.float64
            )

        layout = NodeLayout(
            topic_ids=[p["topic_id"] for p in raw["positions"]],
            positions=np.array(
                [p["coords"] for p in raw["positions"]], dtype=np.float64
            ),
            pearson=_none_to_nan(raw["fit"]["pearson"]),
            spearman=_none_to_nan(raw["fit"]["spearman"]),
            isolated=list(raw.get("isolated", [])),
        )
    return graph, layout
