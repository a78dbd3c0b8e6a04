"""Cleaning steps applied to a recording before event detection and labeling."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import GazeFormatError, GazeRecording, GazeSample, Validity

DEFAULT_MEDIAN_WINDOW = 3
DEFAULT_MAX_GAP = 0.075


@dataclass(frozen=True)
class CalibrationWindow:
    t_start: float
    t_end: float
    target_x: float
    target_y: float

    def __post_init__(self):
        if not self.t_start < self.t_end:
            raise ValueError(f"calibration window needs t_start < t_end, got {self.t_start}..{self.t_end}")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.t_start + self.t_end)


def _valid_runs(valid: np.ndarray) -> list[tuple[int, int]]:
    """Half-open index ranges of consecutive True entries."""
    runs = []
    start = None
    for i, v in enumerate(valid):
        if v and start is None:
            start = i
        elif not v and start is not None:
            runs.append((start, i))
            start = None
    if start is not None:
        runs.append((start, len(valid)))
    return runs


def _centered_median(values: np.ndarray, half: int) -> np.ndarray:
    n = len(values)
    out = values.copy()
    for i in range(n):
        # shrink symmetrically at the edges so every window has odd size
        h = min(half, i, n - 1 - i)
        if h:
            out[i] = np.median(values[i - h:i + h + 1])
    return out


def median_filter(recording: GazeRecording, window: int = DEFAULT_MEDIAN_WINDOW) -> GazeRecording:
    """Per-axis running median over Valid samples.

    Each run of consecutive Valid samples is filtered on its own, so a blink or
    dropout never contributes to (or borrows from) the window of its neighbours.
    Near the ends of a run the window is shrunk symmetrically, keeping every
    median an actual input value.
    """
    if isinstance(window, bool) or int(window) != window or window < 1 or window % 2 == 0:
        raise ValueError(f"median window must be an odd positive integer, got {window}")
    if window > len(recording):
        raise ValueError(f"median window {window} exceeds sample count {len(recording)}")
    if window == 1:
        return recording
    t, x, y, valid = recording.arrays()
    fx, fy = x.copy(), y.copy()
    half = window // 2
    for a, b in _valid_runs(valid):
        fx[a:b] = _centered_median(x[a:b], half)
        fy[a:b] = _centered_median(y[a:b], half)
    samples = [
        GazeSample(s.t, float(fx[i]), float(fy[i]), s.validity) if s.is_valid else s
        for i, s in enumerate(recording.samples)
    ]
    return recording.with_samples(samples)


def interpolate_gaps(recording: GazeRecording, max_gap: float = DEFAULT_MAX_GAP) -> GazeRecording:
    """Fill short Missing runs by linear interpolation; relabel the rest as Blink.

    A run qualifies when it is bracketed by Valid samples on both sides and the
    bracketing samples are at most ``max_gap`` seconds apart.
    """
    if not max_gap > 0:
        raise ValueError(f"max_gap must be positive, got {max_gap}")
    samples = list(recording.samples)
    n = len(samples)
    i = 0
    while i < n:
        if samples[i].validity is not Validity.MISSING:
            i += 1
            continue
        j = i
        while j < n and samples[j].validity is Validity.MISSING:
            j += 1
        before = samples[i - 1] if i > 0 else None
        after = samples[j] if j < n else None
        bounded = before is not None and after is not None and before.is_valid and after.is_valid
        if bounded and after.t - before.t <= max_gap:
            span = after.t - before.t
            for k in range(i, j):
                w = (samples[k].t - before.t) / span
                samples[k] = GazeSample(
                    samples[k].t,
                    before.x + w * (after.x - before.x),
                    before.y + w * (after.y - before.y),
                    Validity.VALID,
                )
        else:
            for k in range(i, j):
                samples[k] = GazeSample(samples[k].t, samples[k].x, samples[k].y, Validity.BLINK)
        i = j
    return recording.with_samples(samples)


def calibration_offsets(recording: GazeRecording, calibrations: Sequence[CalibrationWindow]):
    """Observed-minus-target offset for each window, ordered by window midpoint."""
    t, x, y, valid = recording.arrays()
    rows = []
    for cw in sorted(calibrations, key=lambda c: c.midpoint):
        inside = valid & (t >= cw.t_start) & (t <= cw.t_end)
        if not inside.any():
            raise ValueError(f"calibration window {cw.t_start}..{cw.t_end} contains no Valid samples")
        rows.append((cw.midpoint, x[inside].mean() - cw.target_x, y[inside].mean() - cw.target_y))
    mids = [r[0] for r in rows]
    if len(set(mids)) != len(mids):
        raise ValueError("calibration windows must have distinct midpoints")
    return rows


def drift_correct(recording: GazeRecording, calibrations: Sequence[CalibrationWindow]) -> GazeRecording:
    """Subtract a piecewise-linear drift estimate from every Valid sample.

    Offsets are interpolated linearly between window midpoints and held flat
    outside the first and last midpoint.
    """
    if not calibrations:
        return recording
    rows = calibration_offsets(recording, calibrations)
    mids = np.array([r[0] for r in rows])
    dx = np.array([r[1] for r in rows])
    dy = np.array([r[2] for r in rows])
    t, x, y, valid = recording.arrays()
    ox = np.interp(t, mids, dx)
    oy = np.interp(t, mids, dy)
    samples = [
        GazeSample(s.t, float(x[i] - ox[i]), float(y[i] - oy[i]), s.validity) if s.is_valid else s
        for i, s in enumerate(recording.samples)
    ]
    return recording.with_samples(samples)


def read_calibration_file(path) -> list[CalibrationWindow]:
    path = Path(path)
    out = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise GazeFormatError(f"{path}: line {lineno}: expected 't_start t_end target_x target_y'")
        try:
            out.append(CalibrationWindow(*(float(p) for p in parts)))
        except ValueError as exc:
            raise GazeFormatError(f"{path}: line {lineno}: {exc}") from None
    return out


def preprocess(
    recording: GazeRecording,
    median_window: int = DEFAULT_MEDIAN_WINDOW,
    max_gap: float = DEFAULT_MAX_GAP,
    calibrations: Sequence[CalibrationWindow] = (),
) -> GazeRecording:
    """Standard chain: gap filling, median smoothing, then drift correction."""
    rec = interpolate_gaps(recording, max_gap)
    rec = median_filter(rec, median_window)
    return drift_correct(rec, calibrations)
