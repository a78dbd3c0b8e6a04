"""SEEV attention allocation: Salience, Effort, Expectancy and Value per AOI.

Each AOI gets a raw score ``s*S - ef*EF + ex*EX + v*V``; negative scores are
clipped to zero and the rest normalised into a probability of attending that
AOI.  If every score clips to zero the prediction is uniform.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional

import numpy as np

from .aoi import DwellReport
from .core import GazeFormatError


@dataclass(frozen=True)
class AoiFactors:
    salience: float
    effort: float
    expectancy: float
    value: float

    def __post_init__(self):
        for name in ("salience", "effort", "expectancy", "value"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


@dataclass(frozen=True)
class SeevWeights:
    s: float = 1.0
    ef: float = 1.0
    ex: float = 1.0
    v: float = 1.0

    def __post_init__(self):
        for name in ("s", "ef", "ex", "v"):
            w = getattr(self, name)
            if not (w >= 0 and math.isfinite(w)):
                raise ValueError(f"weight {name} must be a finite non-negative number, got {w}")


@dataclass(frozen=True)
class SeevParams:
    factors: Mapping[int, AoiFactors]
    weights: SeevWeights = SeevWeights()

    def __post_init__(self):
        if not self.factors:
            raise ValueError("SEEV needs at least one AOI")


@dataclass(frozen=True)
class SeevPrediction:
    probabilities: Mapping[int, float]


@dataclass(frozen=True)
class SeevComparison:
    total_variation: float
    pearson_r: Optional[float]
    labels: tuple[int, ...]
    predicted: tuple[float, ...]
    observed: tuple[float, ...]


def raw_scores(params: SeevParams) -> dict[int, float]:
    w = params.weights
    return {
        label: w.s * f.salience - w.ef * f.effort + w.ex * f.expectancy + w.v * f.value
        for label, f in params.factors.items()
    }


def seev_scores(params: SeevParams) -> SeevPrediction:
    raw = raw_scores(params)
    clipped = {label: max(r, 0.0) for label, r in raw.items()}
    total = math.fsum(clipped.values())
    if total <= 0:
        p = 1.0 / len(clipped)
        return SeevPrediction({label: p for label in clipped})
    return SeevPrediction({label: r / total for label, r in clipped.items()})


def pearson(a, b) -> Optional[float]:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) < 2 or np.all(a == a[0]) or np.all(b == b[0]):
        return None
    da, db = a - a.mean(), b - b.mean()
    r = float(np.dot(da, db) / math.sqrt(np.dot(da, da) * np.dot(db, db)))
    return min(1.0, max(-1.0, r))


def total_variation(p, q) -> float:
    return 0.5 * math.fsum(abs(x - y) for x, y in zip(p, q))


def compare(prediction: SeevPrediction, observed: DwellReport) -> SeevComparison:
    """Compare predicted attention against observed dwell, restricted to the shared AOIs.

    Both distributions are renormalised over the shared labels first.
    """
    obs = observed.durations
    labels = tuple(sorted(set(prediction.probabilities) & set(obs)))
    if not labels:
        raise ValueError("prediction and observed dwell share no AOI labels")
    p = np.array([prediction.probabilities[k] for k in labels])
    q = np.array([obs[k] for k in labels], dtype=float)
    if p.sum() <= 0 or q.sum() <= 0:
        raise ValueError("no probability mass on the shared AOIs")
    p = p / p.sum()
    q = q / q.sum()
    return SeevComparison(total_variation(p, q), pearson(p, q), labels, tuple(p.tolist()), tuple(q.tolist()))


def read_seev_params(path) -> SeevParams:
    path = Path(path)
    factors: dict[int, AoiFactors] = {}
    weights = None
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "weights":
                if len(parts) != 5:
                    raise ValueError("expected 'weights s ef ex v'")
                weights = SeevWeights(*(float(p) for p in parts[1:]))
                continue
            if len(parts) != 5:
                raise ValueError("expected 'aoi_label S EF EX V'")
            label = int(parts[0])
            if label in factors:
                raise ValueError(f"duplicate AOI label {label}")
            factors[label] = AoiFactors(*(float(p) for p in parts[1:]))
        except ValueError as exc:
            raise GazeFormatError(f"{path}: line {lineno}: {exc}") from None
    try:
        return SeevParams(factors, weights if weights is not None else SeevWeights())
    except ValueError as exc:
        raise GazeFormatError(f"{path}: {exc}") from None


def write_seev_params(params: SeevParams, path) -> None:
    w = params.weights
    lines = ["# aoi_label S EF EX V"]
    for label, f in params.factors.items():
        lines.append(f"{label} {f.salience!r} {f.effort!r} {f.expectancy!r} {f.value!r}")
    lines.append(f"weights {w.s!r} {w.ef!r} {w.ex!r} {w.v!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_seev_report(comparison: SeevComparison, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["aoi_label", "predicted_p", "observed_p"])
        for label, p, q in zip(comparison.labels, comparison.predicted, comparison.observed):
            w.writerow([label, format(p, ".17g"), format(q, ".17g")])
