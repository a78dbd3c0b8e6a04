from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..core import LabeledPoint
from .multiclass import point_features


@dataclass(frozen=True)
class EvalMetrics:
    accuracy: float
    precision: float
    recall: float
    f1: float


def confusion_matrix(y_true, y_pred, classes) -> np.ndarray:
    index = {c: i for i, c in enumerate(classes)}
    cm = np.zeros((len(classes), len(classes)), dtype=int)
    for t, p in zip(y_true, y_pred):
        cm[index[int(t)], index[int(p)]] += 1
    return cm


def classification_metrics(y_true, y_pred) -> EvalMetrics:
    """Accuracy plus macro-averaged precision and recall; F1 from the two macro averages."""
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    if len(y_true) == 0:
        raise ValueError("cannot evaluate on empty data")
    classes = sorted(set(y_true.tolist()) | set(y_pred.tolist()))
    cm = confusion_matrix(y_true, y_pred, classes)
    tp = np.diag(cm).astype(float)
    predicted = cm.sum(axis=0)
    actual = cm.sum(axis=1)
    prec = np.divide(tp, predicted, out=np.zeros_like(tp), where=predicted > 0)
    rec = np.divide(tp, actual, out=np.zeros_like(tp), where=actual > 0)
    p, r = float(prec.mean()), float(rec.mean())
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return EvalMetrics(float(tp.sum() / len(y_true)), p, r, f1)


def evaluate(model, data: Sequence[LabeledPoint]) -> EvalMetrics:
    if not data:
        raise ValueError("cannot evaluate on empty data")
    X, y = point_features(data, model.use_time)
    return classification_metrics(y, model.predict_many(X))
