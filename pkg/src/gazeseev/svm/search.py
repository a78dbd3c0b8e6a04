"""Hold-out grid search over (C, gamma)."""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ..core import LabeledPoint
from .kernel import squared_distances
from .multiclass import Scaling, SvmModel, fit_arrays, point_features
from .smo import RbfParams

DEFAULT_C_GRID = (26.5, 26.75, 27.0, 27.25, 27.5, 27.75, 28.0)
DEFAULT_GAMMA_GRID = tuple(2.0 ** -e for e in (14.5, 14.75, 15.0, 15.25, 15.5, 15.75, 16.0))
# best cell reported for the original eye-tracking data; kept as a reference, not a target
REFERENCE_PARAMS = RbfParams(27.0, 2.0 ** -15)

DEFAULT_HOLDOUT = 0.2


@dataclass(frozen=True)
class GridSearchResult:
    cells: Mapping[tuple[float, float], float]
    best: tuple[float, float]
    split_seed: int
    train_indices: tuple[int, ...] = ()
    holdout_indices: tuple[int, ...] = ()

    @property
    def best_params(self) -> RbfParams:
        return RbfParams(*self.best)

    @property
    def best_accuracy(self) -> float:
        return self.cells[self.best]


def pick_best(cells: Mapping[tuple[float, float], float]) -> tuple[float, float]:
    """Highest accuracy; ties go to the smaller C, then the smaller gamma."""
    return min(cells, key=lambda cg: (-cells[cg], cg[0], cg[1]))


def stratified_split(labels, holdout_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    if not 0 < holdout_fraction < 1:
        raise ValueError(f"holdout fraction must lie in (0, 1), got {holdout_fraction}")
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    train, hold = [], []
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        if len(idx) < 2:
            raise ValueError(f"class {c} has {len(idx)} point(s); stratified split needs at least 2")
        idx = rng.permutation(idx)
        k = min(max(int(round(holdout_fraction * len(idx))), 1), len(idx) - 1)
        hold.extend(idx[:k])
        train.extend(idx[k:])
    return np.sort(np.array(train)), np.sort(np.array(hold))


_shared: dict = {}


def _init_shared(X_train, y_train, X_hold, y_hold, sq_dist, use_time, normalize):
    _shared.update(X_train=X_train, y_train=y_train, X_hold=X_hold, y_hold=y_hold,
                   sq_dist=sq_dist, use_time=use_time, normalize=normalize)


def _score_cell(cell: tuple[float, float]) -> tuple[tuple[float, float], float]:
    s = _shared
    model = fit_arrays(s["X_train"], s["y_train"], RbfParams(*cell), s["use_time"], s["normalize"],
                       sq_dist=s["sq_dist"])
    acc = float(np.mean(model.predict_many(s["X_hold"]) == s["y_hold"]))
    return cell, acc


def grid_search(
    data: Sequence[LabeledPoint],
    c_grid: Sequence[float] = DEFAULT_C_GRID,
    gamma_grid: Sequence[float] = DEFAULT_GAMMA_GRID,
    holdout_fraction: float = DEFAULT_HOLDOUT,
    seed: int = 0,
    use_time: bool = False,
    normalize: bool = False,
    n_jobs: int = 1,
    cell_order: Sequence[tuple[float, float]] | None = None,
) -> GridSearchResult:
    """Score every (C, gamma) cell on one shared stratified hold-out split.

    The split is drawn once, before any cell is trained, so results do not
    depend on ``n_jobs`` or on ``cell_order``.
    """
    if not len(c_grid) or not len(gamma_grid):
        raise ValueError("C and gamma grids must be non-empty")
    X, labels = point_features(data, use_time)
    train, hold = stratified_split(labels, holdout_fraction, seed)
    X_train, y_train = X[train], labels[train]
    Xs = Scaling.fit(X_train).apply(X_train) if normalize else X_train
    sq = squared_distances(Xs, Xs)
    cells = list(cell_order) if cell_order is not None else [(float(c), float(g)) for c in c_grid for g in gamma_grid]
    initargs = (X_train, y_train, X[hold], labels[hold], sq, use_time, normalize)
    if n_jobs > 1:
        with ProcessPoolExecutor(n_jobs, initializer=_init_shared, initargs=initargs) as pool:
            scored = dict(pool.map(_score_cell, cells))
    else:
        _init_shared(*initargs)
        try:
            scored = dict(_score_cell(cell) for cell in cells)
        finally:
            _shared.clear()
    ordered = {(float(c), float(g)): scored[(float(c), float(g))] for c in c_grid for g in gamma_grid
               if (float(c), float(g)) in scored}
    for cell, acc in scored.items():
        ordered.setdefault(cell, acc)
    return GridSearchResult(ordered, pick_best(ordered), seed, tuple(int(i) for i in train), tuple(int(i) for i in hold))


def fit_best(data: Sequence[LabeledPoint], result: GridSearchResult, use_time: bool = False,
             normalize: bool = False) -> SvmModel:
    """Retrain the winning cell on the training side of the search split."""
    X, labels = point_features(data, use_time)
    idx = np.array(result.train_indices, dtype=int)
    return fit_arrays(X[idx], labels[idx], result.best_params, use_time, normalize)


def write_grid_csv(result: GridSearchResult, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["c", "gamma", "accuracy"])
        for (c, g), acc in result.cells.items():
            w.writerow([format(c, ".17g"), format(g, ".17g"), format(acc, ".17g")])
