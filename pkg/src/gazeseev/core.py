"""Domain types and file formats shared by the rest of the package.

Gaze CSV layout (one sample per row)::

    participant_id,group,scenario,sample_rate_hz,t,x,y,validity

AOI config layout (one rectangle per line, ``#`` starts a comment)::

    label x_min y_min x_max y_max
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

GAZE_HEADER = ["participant_id", "group", "scenario", "sample_rate_hz", "t", "x", "y", "validity"]


class GazeFormatError(ValueError):
    """Raised when a gaze log or config file cannot be parsed."""


class Validity(enum.Enum):
    VALID = "valid"
    MISSING = "missing"
    BLINK = "blink"


class Group(enum.Enum):
    CONTROL = "control"
    ADHD_LOW = "adhd_low"
    ADHD_MEDIUM = "adhd_medium"
    ADHD_HIGH = "adhd_high"


class Scenario(enum.Enum):
    INFO_RETRIEVAL = "info_retrieval"
    DYNAMIC_NAVIGATION = "dynamic_navigation"
    COLLABORATIVE = "collaborative"


def _parse_enum(kind, token: str):
    try:
        return kind(token.strip().lower())
    except ValueError:
        choices = ", ".join(m.value for m in kind)
        raise GazeFormatError(f"unknown {kind.__name__.lower()} {token!r} (expected one of {choices})") from None


@dataclass(frozen=True)
class GazeSample:
    t: float
    x: float
    y: float
    validity: Validity = Validity.VALID

    @property
    def is_valid(self) -> bool:
        return self.validity is Validity.VALID


@dataclass(frozen=True)
class GazeRecording:
    participant_id: str
    group: Group
    scenario: Scenario
    sample_rate: float
    samples: tuple[GazeSample, ...]

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        if not (self.sample_rate > 0 and math.isfinite(self.sample_rate)):
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if not self.samples:
            raise ValueError("a recording needs at least one sample")
        prev = None
        for i, s in enumerate(self.samples):
            if not (math.isfinite(s.t) and s.t >= 0):
                raise ValueError(f"sample {i}: timestamp {s.t} must be finite and >= 0")
            if prev is not None and s.t <= prev:
                raise ValueError(f"sample {i}: timestamp {s.t} not strictly increasing (previous {prev})")
            prev = s.t

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        return self.samples[-1].t - self.samples[0].t

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Return ``(t, x, y, valid_mask)`` as numpy arrays."""
        t = np.array([s.t for s in self.samples], dtype=float)
        x = np.array([s.x for s in self.samples], dtype=float)
        y = np.array([s.y for s in self.samples], dtype=float)
        valid = np.array([s.is_valid for s in self.samples], dtype=bool)
        return t, x, y, valid

    def with_samples(self, samples: Iterable[GazeSample]) -> "GazeRecording":
        return GazeRecording(self.participant_id, self.group, self.scenario, self.sample_rate, tuple(samples))


@dataclass(frozen=True)
class Aoi:
    label: int
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if int(self.label) != self.label or self.label < 1:
            raise ValueError(f"AOI label must be a positive integer, got {self.label}")
        if not self.x_min < self.x_max:
            raise ValueError(f"AOI {self.label}: degenerate rectangle (x_min={self.x_min} >= x_max={self.x_max})")
        if not self.y_min < self.y_max:
            raise ValueError(f"AOI {self.label}: degenerate rectangle (y_min={self.y_min} >= y_max={self.y_max})")

    def contains(self, x: float, y: float) -> bool:
        # half-open: min edges inside, max edges outside
        return self.x_min <= x < self.x_max and self.y_min <= y < self.y_max

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)


@dataclass(frozen=True)
class LabeledPoint:
    x: float
    y: float
    label: int
    t: float = field(default=0.0, compare=True)


def validate_aois(aois: Sequence[Aoi]) -> None:
    seen = set()
    for a in aois:
        if a.label in seen:
            raise ValueError(f"duplicate AOI label {a.label}")
        seen.add(a.label)


def _fmt(v: float) -> str:
    return format(v, ".17g")


def read_gaze_csv(path) -> GazeRecording:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise GazeFormatError(f"{path}: empty file") from None
        if [h.strip() for h in header] != GAZE_HEADER:
            raise GazeFormatError(f"{path}: line 1: expected header {','.join(GAZE_HEADER)}")
        meta = None
        samples = []
        prev_t = None
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(GAZE_HEADER):
                raise GazeFormatError(f"{path}: line {lineno}: expected {len(GAZE_HEADER)} fields, got {len(row)}")
            pid, group, scenario, rate, t, x, y, validity = (c.strip() for c in row)
            try:
                row_meta = (pid, _parse_enum(Group, group), _parse_enum(Scenario, scenario), float(rate))
                validity = _parse_enum(Validity, validity)
                t = float(t)
                if validity is Validity.VALID:
                    x, y = float(x), float(y)
                else:
                    x = float(x) if x else 0.0
                    y = float(y) if y else 0.0
            except (ValueError, GazeFormatError) as exc:
                raise GazeFormatError(f"{path}: line {lineno}: {exc}") from None
            if not (math.isfinite(t) and t >= 0):
                raise GazeFormatError(f"{path}: line {lineno}: timestamp {t} must be finite and >= 0")
            if validity is Validity.VALID and not (math.isfinite(x) and math.isfinite(y)):
                raise GazeFormatError(f"{path}: line {lineno}: non-finite coordinates")
            if prev_t is not None and t <= prev_t:
                raise GazeFormatError(f"{path}: line {lineno}: timestamp {t} not strictly increasing")
            if meta is None:
                meta = row_meta
            elif row_meta != meta:
                raise GazeFormatError(f"{path}: line {lineno}: recording metadata changes mid-file")
            samples.append(GazeSample(t, x, y, validity))
            prev_t = t
    if not samples:
        raise GazeFormatError(f"{path}: no samples")
    pid, group, scenario, rate = meta
    try:
        return GazeRecording(pid, group, scenario, rate, tuple(samples))
    except ValueError as exc:
        raise GazeFormatError(f"{path}: {exc}") from None


def write_gaze_csv(recording: GazeRecording, path) -> None:
    if not recording.samples:
        raise ValueError("cannot write an empty recording")
    rate = _fmt(recording.sample_rate)
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(GAZE_HEADER)
        for s in recording.samples:
            w.writerow([
                recording.participant_id, recording.group.value, recording.scenario.value, rate,
                _fmt(s.t), _fmt(s.x), _fmt(s.y), s.validity.value,
            ])


def read_aoi_config(path) -> list[Aoi]:
    path = Path(path)
    aois: list[Aoi] = []
    seen: set[int] = set()
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5:
            raise GazeFormatError(f"{path}: line {lineno}: expected 'label x_min y_min x_max y_max'")
        try:
            label = int(parts[0])
            x0, y0, x1, y1 = (float(p) for p in parts[1:])
        except ValueError as exc:
            raise GazeFormatError(f"{path}: line {lineno}: {exc}") from None
        if label == 0:
            raise GazeFormatError(f"{path}: line {lineno}: label 0 is reserved for 'outside all AOIs'")
        if label in seen:
            raise GazeFormatError(f"{path}: line {lineno}: duplicate label {label}")
        try:
            aois.append(Aoi(label, x0, y0, x1, y1))
        except ValueError as exc:
            raise GazeFormatError(f"{path}: line {lineno}: {exc}") from None
        seen.add(label)
    return aois


def write_aoi_config(aois: Sequence[Aoi], path) -> None:
    lines = ["# label x_min y_min x_max y_max"]
    lines += [f"{a.label} {_fmt(a.x_min)} {_fmt(a.y_min)} {_fmt(a.x_max)} {_fmt(a.y_max)}" for a in aois]
    Path(path).write_text("\n".join(lines) + "\n")
