"""Low-dimensional projection of unit adjacency vectors.

Two fits are offered: an unsupervised SVD of the centered unit matrix, and a
two-group means rotation whose first axis is the normalized difference of the
group means. Both produce an orthonormal basis; SVD sign ambiguity is resolved
by forcing each direction's largest-magnitude entry positive so repeated runs
are identical.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .accumulate import AccumulatedModel
from .errors import DegenerateMeans, DimensionMismatch, EmptyGroup, RankDeficient
from .validation import check_matrix

ORTHONORMALITY_TOL = 1e-9
_MEANS_GAP_MIN = 1e-12


@dataclass
class ProjectionModel:
    method: str  # "svd" | "means_rotation"
    center: np.ndarray  # (n_pairs,)
    basis: np.ndarray  # (d, n_pairs), orthonormal rows
    variance_explained: np.ndarray  # (d,)
    groups_compared: tuple[str, str] | None = None
    tolerance: float = ORTHONORMALITY_TOL

    @property
    def n_dims(self) -> int:
        return self.basis.shape[0]


@dataclass(frozen=True)
class UnitPoint:
    unit_id: str
    coords: np.ndarray
    group: str | None = None


def _fix_signs(basis: np.ndarray) -> np.ndarray:
    """Flip each direction so its largest-magnitude entry is positive."""
    basis = basis.copy()
    for row in basis:
        k = int(np.argmax(np.abs(row)))
        if row[k] < 0:
            row *= -1.0
    return basis


def _rank(singular_values: np.ndarray, n: int, p: int) -> int:
    if singular_values.size == 0 or singular_values[0] == 0.0:
        return 0
    tol = singular_values[0] * max(n, p) * np.finfo(np.float64).eps
    return int((singular_values > tol).sum())


class SVDProjection(TransformerMixin, BaseEstimator):
    """Orthonormal projection onto the top right singular directions.

    Centers on the grand mean, then keeps the ``n_components`` leading
    directions of the centered matrix. Raises RankDeficient rather than
    padding when the data cannot support the request.
    """

    def __init__(self, n_components: int = 2):
        self.n_components = n_components

    def fit(self, X, y=None):
        d = int(self.n_components)
        if d < 1:
            raise ValueError("n_components must be >= 1")
        X = check_matrix(X)
        self.center_ = X.mean(axis=0)
        centered = X - self.center_
        _, s, vt = np.linalg.svd(centered, full_matrices=False)
        if _rank(s, *centered.shape) < d:
            raise RankDeficient(
                f"centered unit matrix has rank {_rank(s, *centered.shape)} < {d}"
            )
        self.basis_ = _fix_signs(vt[:d])
        total = float((s**2).sum())
        self.variance_explained_ = (s[:d] ** 2) / total
        self.singular_values_ = s[:d].copy()
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "basis_")
        X = check_matrix(X)
        if X.shape[1] != self.basis_.shape[1]:
            raise DimensionMismatch(
                f"expected vectors of length {self.basis_.shape[1]}, got {X.shape[1]}"
            )
        return (X - self.center_) @ self.basis_.T


class MeansRotationProjection(TransformerMixin, BaseEstimator):
    """Supervised two-group rotation.

    The first axis is the normalized difference of the two group means
    (computed after grand-mean centering), so the projected means separate
    only along dimension 1. Remaining axes come from an SVD of the residual
    after the first axis is removed, completed deterministically from the
    canonical basis when the residual is rank-deficient.
    """

    def __init__(self, group_a: str, group_b: str, n_components: int = 2):
        self.group_a = group_a
        self.group_b = group_b
        self.n_components = n_components

    def fit(self, X, y):
        d = int(self.n_components)
        if d < 2:
            raise ValueError("means rotation requires n_components >= 2")
        X = check_matrix(X)
        y = np.asarray(y)
        mask_a = y == self.group_a
        mask_b = y == self.group_b
        if not mask_a.any():
            raise EmptyGroup(f"no unit carries group label {self.group_a!r}")
        if not mask_b.any():
            raise EmptyGroup(f"no unit carries group label {self.group_b!r}")

        self.center_ = X.mean(axis=0)
        centered = X - self.center_
        diff = centered[mask_a].mean(axis=0) - centered[mask_b].mean(axis=0)
        gap = float(np.linalg.norm(diff))
        if gap < _MEANS_GAP_MIN:
            raise DegenerateMeans(
                f"group means coincide (|meanA - meanB| = {gap:.3e})"
            )
        first = diff / gap

        residual = centered - np.outer(centered @ first, first)
        _, s, vt = np.linalg.svd(residual, full_matrices=False)
        # judge residual singular values against the scale of the centered
        # data, not the residual's own leading value: an exactly degenerate
        # residual must contribute no directions
        scale = float(np.linalg.norm(centered))
        tol = scale * max(residual.shape) * np.finfo(np.float64).eps
        candidates = [vt[k] for k in range(len(s)) if s[k] > tol]
        directions = _complete_basis([first], d, X.shape[1], candidates)
        basis = np.vstack(directions)
        basis[1:] = _fix_signs(basis[1:])

        self.basis_ = basis
        self.mean_gap_ = gap
        total = float((centered**2).sum())
        axis_var = ((centered @ basis.T) ** 2).sum(axis=0)
        self.variance_explained_ = axis_var / total if total > 0 else axis_var
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "basis_")
        X = check_matrix(X)
        if X.shape[1] != self.basis_.shape[1]:
            raise DimensionMismatch(
                f"expected vectors of length {self.basis_.shape[1]}, got {X.shape[1]}"
            )
        return (X - self.center_) @ self.basis_.T


def _complete_basis(
    directions: list[np.ndarray],
    d: int,
    n_features: int,
    candidates: list[np.ndarray] | None = None,
):
    """Extend to d orthonormal directions by Gram-Schmidt.

    Preferred candidate directions are consumed first, then the canonical
    basis e_1..e_p; near-dependent candidates are skipped. Deterministic.
    """
    if d > n_features:
        raise RankDeficient(f"cannot build {d} directions in {n_features} features")
    out = [np.asarray(v, dtype=np.float64) for v in directions]
    queue = list(candidates or [])
    feature = 0
    while len(out) < d:
        if queue:
            candidate = np.asarray(queue.pop(0), dtype=np.float64).copy()
        elif feature < n_features:
            candidate = np.zeros(n_features)
            candidate[feature] = 1.0
            feature += 1
        else:
            raise RankDeficient("basis completion exhausted the canonical directions")
        for v in out:
            candidate -= (candidate @ v) * v
        norm = np.linalg.norm(candidate)
        if norm > 1e-8:
            out.append(candidate / norm)
    return out


# ---------------------------------------------------------------------------
# domain operations


def _require_sphere(model: AccumulatedModel) -> None:
    if model.normalization != "sphere":
        raise ValueError("projection requires a sphere-normalized model")


def _points(model: AccumulatedModel, coords: np.ndarray) -> list[UnitPoint]:
    return [
        UnitPoint(uid, coords[k], model.groups.get(uid))
        for k, uid in enumerate(model.unit_ids)
    ]


def svd_projection(
    model: AccumulatedModel, d: int = 2
) -> tuple[ProjectionModel, list[UnitPoint]]:
    _require_sphere(model)
    est = SVDProjection(n_components=d).fit(model.vectors)
    projection = ProjectionModel(
        method="svd",
        center=est.center_,
        basis=est.basis_,
        variance_explained=est.variance_explained_,
    )
    return projection, _points(model, est.transform(model.vectors))


def means_rotation_projection(
    model: AccumulatedModel, group_a: str, group_b: str, d: int = 2
) -> tuple[ProjectionModel, list[UnitPoint]]:
    _require_sphere(model)
    est = MeansRotationProjection(group_a, group_b, n_components=d)
    est.fit(model.vectors, model.unit_groups())
    projection = ProjectionModel(
        method="means_rotation",
        center=est.center_,
        basis=est.basis_,
        variance_explained=est.variance_explained_,
        groups_compared=(group_a, group_b),
    )
    return projection, _points(model, est.transform(model.vectors))


def project_units(
    projection: ProjectionModel, model: AccumulatedModel
) -> list[UnitPoint]:
    """Project a model's units with an existing fit; a fixed point on the fitting model."""
    if model.vectors.shape[1] != projection.basis.shape[1]:
        raise DimensionMismatch(
            f"model pair-vector length {model.vectors.shape[1]} does not match "
            f"projection length {projection.basis.shape[1]}"
        )
    coords = (model.vectors - projection.center) @ projection.basis.T
    return _points(model, coords)


# ---------------------------------------------------------------------------
# interchange files


def write_projection(projection: ProjectionModel, path) -> None:
    payload = {
        "schema_version": 1,
        "method": projection.method,
        "center": [float(v) for v in projection.center],
        "basis": [[float(v) for v in row] for row in projection.basis],
        "variance_explained": [float(v) for v in projection.variance_explained],
        "groups_compared": list(projection.groups_compared)
        if projection.groups_compared
        else None,
        "tolerance": projection.tolerance,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_projection(path) -> ProjectionModel:
    with open(Path(path), encoding="utf-8") as fh:
        payload = json.load(fh)
    groups = payload.get("groups_compared")
    return ProjectionModel(
        method=payload["method"],
        center=np.array(payload["center"], dtype=np.float64),
        basis=np.array(payload["basis"], dtype=np.float64),
        variance_explained=np.array(payload["variance_explained"], dtype=np.float64),
        groups_compared=tuple(groups) if groups else None,
        tolerance=float(payload["tolerance"]),
    )


def write_points(points: list[UnitPoint], path) -> None:
    d = len(points[0].coords) if points else 0
    header = ["unit_id", "group"] + [f"dim{k + 1}" for k in range(d)]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for pt in points:
            row = [pt.unit_id, pt.group or ""]
            row += [repr(float(c)) for c in pt.coords]
            fh.write(",".join(row) + "\n")


def read_points(path) -> list[UnitPoint]:
    points: list[UnitPoint] = []
    with open(Path(path), encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split(",")
        dims = [h for h in header if h.startswith("dim")]
        for raw in fh:
            parts = raw.rstrip("\n").split(",")
            points.append(
                UnitPoint(
                    unit_id=parts[0],
                    coords=np.array(
                        [float(v) for v in parts[2 : 2 + len(dims)]], dtype=np.float64
                    ),
                    group=parts[1] or None,
                )
            )
    return points
