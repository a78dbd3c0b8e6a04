"""Geometric AOI labeling and dwell-time aggregation."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .core import Aoi, GazeRecording, LabeledPoint

OUTSIDE = 0


@dataclass(frozen=True)
class DwellReport:
    durations: Mapping[int, float]
    total: float

    @property
    def proportions(self) -> dict[int, float]:
        if self.total <= 0:
            return {label: 0.0 for label in self.durations}
        return {label: d / self.total for label, d in self.durations.items()}

    def proportion(self, label: int) -> float:
        return self.proportions.get(label, 0.0)


def label_point(aois: Sequence[Aoi], x: float, y: float) -> int:
    for a in aois:
        if a.contains(x, y):
            return a.label
    return OUTSIDE


def label_array(aois: Sequence[Aoi], x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Vectorised ``label_point``; first AOI in list order wins."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    labels = np.zeros(x.shape, dtype=int)
    unassigned = np.ones(x.shape, dtype=bool)
    for a in aois:
        hit = unassigned & (x >= a.x_min) & (x < a.x_max) & (y >= a.y_min) & (y < a.y_max)
        labels[hit] = a.label
        unassigned &= ~hit
    return labels


def label_recording(aois: Sequence[Aoi], recording: GazeRecording) -> list[LabeledPoint]:
    return [
        LabeledPoint(s.x, s.y, label_point(aois, s.x, s.y), s.t)
        for s in recording.samples if s.is_valid
    ]


def sample_labels(aois: Sequence[Aoi], recording: GazeRecording) -> np.ndarray:
    """Label per sample, with non-Valid samples mapped to 0."""
    _, x, y, valid = recording.arrays()
    labels = label_array(aois, x, y)
    labels[~valid] = OUTSIDE
    return labels


def dwell_from_labels(t: Sequence[float], labels: Sequence[int], all_labels: Sequence[int] = ()) -> DwellReport:
    """Attribute ``[t_i, t_{i+1})`` to ``labels[i]``; the last sample adds no time."""
    t = np.asarray(t, dtype=float)
    if len(t) < 2:
        raise ValueError("dwell time needs at least 2 samples")
    if len(labels) != len(t):
        raise ValueError("labels and timestamps differ in length")
    durations = {int(lab): 0.0 for lab in all_labels}
    durations.setdefault(OUTSIDE, 0.0)
    dt = np.diff(t)
    for lab, d in zip(labels[:-1], dt):
        lab = int(lab)
        durations[lab] = durations.get(lab, 0.0) + float(d)
    return DwellReport(dict(sorted(durations.items())), float(t[-1] - t[0]))


def dwell_times(aois: Sequence[Aoi], recording: GazeRecording) -> DwellReport:
    t = np.array([s.t for s in recording.samples])
    return dwell_from_labels(t, sample_labels(aois, recording), [a.label for a in aois])


def boundary_distance(aois: Sequence[Aoi], x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Distance from each point to the nearest edge of any AOI rectangle."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    best = np.full(x.shape, np.inf)
    for a in aois:
        for (x0, y0, x1, y1) in (
            (a.x_min, a.y_min, a.x_max, a.y_min),
            (a.x_min, a.y_max, a.x_max, a.y_max),
            (a.x_min, a.y_min, a.x_min, a.y_max),
            (a.x_max, a.y_min, a.x_max, a.y_max),
        ):
            px = np.clip(x, min(x0, x1), max(x0, x1))
            py = np.clip(y, min(y0, y1), max(y0, y1))
            best = np.minimum(best, np.hypot(x - px, y - py))
    return best


def write_dwell_csv(report: DwellReport, path) -> None:
    props = report.proportions
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", "duration_s", "proportion"])
        for label, d in report.durations.items():
            w.writerow([label, format(d, ".17g"), format(props[label], ".17g")])
