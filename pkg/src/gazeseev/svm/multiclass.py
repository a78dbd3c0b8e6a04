"""One-vs-one multiclass wrapper around the binary SMO classifier."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from ..core import LabeledPoint
from .kernel import squared_distances
from .smo import DEFAULT_MAX_PASSES, DEFAULT_TOL, BinarySvm, RbfParams, train_binary


@dataclass(frozen=True)
class Scaling:
    """Per-feature affine map applied before the kernel: ``(x - offset) / scale``."""

    offset: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "Scaling":
        sd = X.std(axis=0)
        return cls(X.mean(axis=0), np.where(sd > 0, sd, 1.0))

    def apply(self, X: np.ndarray) -> np.ndarray:
        return (X - self.offset) / self.scale


@dataclass(frozen=True)
class SvmModel:
    classes: tuple[int, ...]
    pairwise_models: Mapping[tuple[int, int], BinarySvm]
    params: RbfParams
    use_time: bool = False
    scaling: Scaling | None = field(default=None)

    @property
    def n_features(self) -> int:
        return 3 if self.use_time else 2

    def pair_decisions(self, X) -> dict[tuple[int, int], np.ndarray]:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise ValueError(f"model expects {self.n_features} features, got {X.shape[1]}")
        if self.scaling is not None:
            X = self.scaling.apply(X)
        return {pair: m.decision_function(X) for pair, m in self.pairwise_models.items()}

    def predict_many(self, X) -> np.ndarray:
        decisions = self.pair_decisions(X)
        index = {c: i for i, c in enumerate(self.classes)}
        n = next(iter(decisions.values())).shape[0]
        votes = np.zeros((n, len(self.classes)), dtype=int)
        for (a, b), f in decisions.items():
            # f >= 0 votes for the smaller label of the pair
            votes[:, index[a]] += f >= 0
            votes[:, index[b]] += f < 0
        # argmax returns the first maximum, i.e. the smallest tied label
        return np.asarray(self.classes)[np.argmax(votes, axis=1)]


def point_features(points: Sequence[LabeledPoint], use_time: bool = False) -> tuple[np.ndarray, np.ndarray]:
    if use_time:
        X = np.array([(p.x, p.y, p.t) for p in points], dtype=float).reshape(-1, 3)
    else:
        X = np.array([(p.x, p.y) for p in points], dtype=float).reshape(-1, 2)
    return X, np.array([p.label for p in points], dtype=int)


def fit_arrays(
    X: np.ndarray,
    labels: np.ndarray,
    params: RbfParams,
    use_time: bool = False,
    normalize: bool = False,
    tol: float = DEFAULT_TOL,
    max_passes: int = DEFAULT_MAX_PASSES,
    sq_dist: np.ndarray | None = None,
) -> SvmModel:
    """Train one binary SVM per class pair on that pair's rows only.

    ``sq_dist`` optionally supplies the squared-distance matrix of the
    (already scaled) rows of ``X`` so callers sweeping gamma can reuse it.
    """
    classes = tuple(int(c) for c in np.unique(labels))
    if len(classes) < 2:
        raise ValueError(f"need at least 2 classes, got {len(classes)}")
    scaling = Scaling.fit(X) if normalize else None
    Xs = scaling.apply(X) if scaling is not None else X
    models = {}
    for a, b in combinations(classes, 2):
        rows = np.flatnonzero((labels == a) | (labels == b))
        y = np.where(labels[rows] == a, 1, -1)
        d2 = sq_dist[np.ix_(rows, rows)] if sq_dist is not None else squared_distances(Xs[rows], Xs[rows])
        models[(a, b)] = train_binary(Xs[rows], y, params, tol, max_passes, kernel=np.exp(-params.gamma * d2))
    return SvmModel(classes, models, params, use_time, scaling)


def train_multiclass(data: Sequence[LabeledPoint], params: RbfParams, use_time: bool = False,
                     normalize: bool = False) -> SvmModel:
    X, labels = point_features(data, use_time)
    return fit_arrays(X, labels, params, use_time, normalize)


def predict(model: SvmModel, point) -> int:
    return int(model.predict_many(np.asarray(point, dtype=float).reshape(1, -1))[0])
