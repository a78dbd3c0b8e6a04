"""Fixation, saccade and blink detection plus the per-recording feature vector."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import GazeRecording, Validity
from .preprocess import _valid_runs


@dataclass(frozen=True)
class FixationEvent:
    t_start: float
    t_end: float
    centroid_x: float
    centroid_y: float
    dispersion: float

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start


@dataclass(frozen=True)
class SaccadeEvent:
    t_start: float
    t_end: float
    amplitude: float
    peak_velocity: float


@dataclass(frozen=True)
class FeatureVector:
    fixation_count: int
    mean_fixation_duration: float
    saccade_count: int
    mean_saccade_amplitude: float
    blink_rate: float

    def as_dict(self) -> dict:
        return {
            "fixation_count": self.fixation_count,
            "mean_fixation_duration": self.mean_fixation_duration,
            "saccade_count": self.saccade_count,
            "mean_saccade_amplitude": self.mean_saccade_amplitude,
            "blink_rate": self.blink_rate,
        }


@dataclass(frozen=True)
class EventConfig:
    """Detector thresholds. Pixel/second defaults assume a desk-mounted 1080p setup."""

    dispersion_px: float = 35.0
    min_fixation_s: float = 0.060
    saccade_velocity: float = 1500.0

    def __post_init__(self):
        for name in ("dispersion_px", "min_fixation_s", "saccade_velocity"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive, got {v}")


def detect_fixations(recording: GazeRecording, dispersion_threshold: float, min_duration: float) -> list[FixationEvent]:
    """Dispersion-threshold (I-DT) identification.

    A window starts at one sample and absorbs following samples while
    ``(max x - min x) + (max y - min y)`` stays within the threshold. When the
    next sample would break the threshold, or the Valid run ends, the window is
    a fixation if it spans at least ``min_duration``; it is then consumed whole.
    Otherwise the window start advances by one sample.
    """
    if not dispersion_threshold > 0:
        raise ValueError(f"dispersion threshold must be positive, got {dispersion_threshold}")
    if not min_duration > 0:
        raise ValueError(f"minimum fixation duration must be positive, got {min_duration}")
    t, x, y, valid = recording.arrays()
    events = []
    for a, b in _valid_runs(valid):
        i = a
        while i < b:
            x_lo = x_hi = x[i]
            y_lo = y_hi = y[i]
            j = i + 1
            while j < b:
                nx_lo, nx_hi = min(x_lo, x[j]), max(x_hi, x[j])
                ny_lo, ny_hi = min(y_lo, y[j]), max(y_hi, y[j])
                if (nx_hi - nx_lo) + (ny_hi - ny_lo) > dispersion_threshold:
                    break
                x_lo, x_hi, y_lo, y_hi = nx_lo, nx_hi, ny_lo, ny_hi
                j += 1
            # window is samples i .. j-1
            if t[j - 1] - t[i] >= min_duration:
                events.append(FixationEvent(
                    float(t[i]), float(t[j - 1]),
                    float(x[i:j].mean()), float(y[i:j].mean()),
                    float((x_hi - x_lo) + (y_hi - y_lo)),
                ))
                i = j
            else:
                i += 1
    return events


def sample_velocities(recording: GazeRecording) -> np.ndarray:
    """Speed (px/s) between sample k and k+1; NaN where either sample is not Valid."""
    t, x, y, valid = recording.arrays()
    if len(t) < 2:
        return np.empty(0)
    v = np.hypot(np.diff(x), np.diff(y)) / np.diff(t)
    v[~(valid[:-1] & valid[1:])] = np.nan
    return v


def detect_saccades(recording: GazeRecording, velocity_threshold: float) -> list[SaccadeEvent]:
    if not velocity_threshold > 0:
        raise ValueError(f"saccade velocity threshold must be positive, got {velocity_threshold}")
    t, x, y, _ = recording.arrays()
    vel = sample_velocities(recording)
    fast = np.nan_to_num(vel, nan=-1.0) >= velocity_threshold
    events = []
    k = 0
    while k < len(fast):
        if not fast[k]:
            k += 1
            continue
        m = k
        while m + 1 < len(fast) and fast[m + 1]:
            m += 1
        # pairs k..m cover samples k..m+1
        events.append(SaccadeEvent(
            float(t[k]), float(t[m + 1]),
            float(math.hypot(x[m + 1] - x[k], y[m + 1] - y[k])),
            float(vel[k:m + 1].max()),
        ))
        k = m + 1
    return events


def count_blinks(recording: GazeRecording) -> int:
    count = 0
    prev_blink = False
    for s in recording.samples:
        is_blink = s.validity is Validity.BLINK
        if is_blink and not prev_blink:
            count += 1
        prev_blink = is_blink
    return count


def blink_rate(recording: GazeRecording) -> float:
    """Blink runs per minute of recording time."""
    duration = recording.duration
    if duration <= 0:
        return 0.0
    return count_blinks(recording) / (duration / 60.0)


def extract_features(recording: GazeRecording, config: EventConfig = EventConfig()) -> FeatureVector:
    fixations = detect_fixations(recording, config.dispersion_px, config.min_fixation_s)
    saccades = detect_saccades(recording, config.saccade_velocity)
    mean_fix = float(np.mean([f.duration for f in fixations])) if fixations else 0.0
    mean_amp = float(np.mean([s.amplitude for s in saccades])) if saccades else 0.0
    return FeatureVector(len(fixations), mean_fix, len(saccades), mean_amp, blink_rate(recording))


def write_events_csv(fixations, saccades, path) -> None:
    rows = [("fixation", f.t_start, f.t_end, f.centroid_x, f.centroid_y) for f in fixations]
    rows += [("saccade", s.t_start, s.t_end, s.amplitude, s.peak_velocity) for s in saccades]
    rows.sort(key=lambda r: (r[1], r[0]))
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["type", "t_start", "t_end", "a", "b"])
        for kind, *vals in rows:
            w.writerow([kind] + [format(v, ".17g") for v in vals])
