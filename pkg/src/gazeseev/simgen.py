"""Seeded synthetic gaze recordings for the dual-task scenarios and severity groups.

Gaze alternates between fixations and short ballistic saccades. Each fixation
lands on a task AOI with probability ``attend_target_prob`` and otherwise on a
uniformly random point of the scene. Blinks arrive as a Poisson process.

All randomness comes from ``numpy.random.default_rng(seed)`` (PCG64); the same
``(profile, aois, seed)`` always yields the same recording.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .aoi import label_array
from .core import Aoi, GazeRecording, GazeSample, Group, LabeledPoint, Scenario, Validity

SCENE_WIDTH = 1920.0
SCENE_HEIGHT = 1080.0

# Demo layout: two task areas with a 200 px gap between them.
DEFAULT_AOIS = (
    Aoi(1, 160.0, 240.0, 860.0, 840.0),
    Aoi(2, 1060.0, 240.0, 1760.0, 840.0),
)


@dataclass(frozen=True)
class ScenarioProfile:
    scenario: Scenario
    group: Group
    attend_target_prob: float
    mean_fixation_duration: float  # s
    fixation_duration_cv: float
    jitter_sd: float  # px
    blink_rate: float  # blinks/min
    drift_rate: float = 0.0  # px/s along the scene diagonal
    duration: float = 60.0  # s
    sample_rate: float = 100.0  # Hz
    dropout_rate: float = 0.0  # short Missing runs per minute
    scene_width: float = SCENE_WIDTH
    scene_height: float = SCENE_HEIGHT

    def __post_init__(self):
        if not 0.0 <= self.attend_target_prob <= 1.0:
            raise ValueError(f"attend_target_prob must lie in [0, 1], got {self.attend_target_prob}")
        for name in ("mean_fixation_duration", "duration", "sample_rate", "scene_width", "scene_height"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("fixation_duration_cv", "jitter_sd", "blink_rate", "dropout_rate", "drift_rate"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")

    def with_overrides(self, **kw) -> "ScenarioProfile":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


# per-group knobs: (attend_target_prob, jitter_sd, fixation_duration_cv, blink_rate, fixation-duration factor)
_GROUP_TABLE = {
    Group.CONTROL: (0.90, 2.5, 0.35, 15.0, 1.00),
    Group.ADHD_LOW: (0.80, 3.5, 0.45, 17.0, 0.95),
    Group.ADHD_MEDIUM: (0.68, 4.5, 0.55, 19.0, 0.90),
    Group.ADHD_HIGH: (0.55, 5.5, 0.65, 21.0, 0.85),
}

# per-scenario knobs: (mean fixation duration s, blink-rate factor)
_SCENARIO_TABLE = {
    Scenario.INFO_RETRIEVAL: (0.32, 1.0),
    Scenario.DYNAMIC_NAVIGATION: (0.24, 1.2),
    Scenario.COLLABORATIVE: (0.28, 0.9),
}


def default_profile(scenario: Scenario, group: Group) -> ScenarioProfile:
    attend, jitter, cv, blinks, fix_factor = _GROUP_TABLE[Group(group)]
    mean_fix, blink_factor = _SCENARIO_TABLE[Scenario(scenario)]
    return ScenarioProfile(
        scenario=Scenario(scenario),
        group=Group(group),
        attend_target_prob=attend,
        mean_fixation_duration=round(mean_fix * fix_factor, 6),
        fixation_duration_cv=cv,
        jitter_sd=jitter,
        blink_rate=round(blinks * blink_factor, 6),
        dropout_rate=3.0,
    )


def all_default_profiles() -> list[ScenarioProfile]:
    return [default_profile(s, g) for s in Scenario for g in Group]


def _lognormal_params(mean: float, cv: float) -> tuple[float, float]:
    sigma2 = math.log1p(cv * cv)
    return math.log(mean) - 0.5 * sigma2, math.sqrt(sigma2)


def _pick_target(rng, profile: ScenarioProfile, aois: Sequence[Aoi]) -> tuple[float, float]:
    if rng.random() < profile.attend_target_prob:
        a = aois[int(rng.integers(len(aois)))]
        return rng.uniform(a.x_min, a.x_max), rng.uniform(a.y_min, a.y_max)
    return rng.uniform(0.0, profile.scene_width), rng.uniform(0.0, profile.scene_height)


def _mark_runs(rng, validity: np.ndarray, t: np.ndarray, rate_per_min: float, lo: float, hi: float, kind: int):
    """Overwrite Poisson-timed runs of length U(lo, hi) seconds with ``kind``."""
    if rate_per_min <= 0:
        return
    duration = t[-1] - t[0] if len(t) > 1 else 0.0
    n_events = rng.poisson(rate_per_min * duration / 60.0)
    starts = np.sort(rng.uniform(t[0], t[-1], n_events))
    lengths = rng.uniform(lo, hi, n_events)
    for s, length in zip(starts, lengths):
        validity[(t >= s) & (t < s + length)] = kind


_VALID, _MISSING, _BLINK = 0, 1, 2
_CODES = {_VALID: Validity.VALID, _MISSING: Validity.MISSING, _BLINK: Validity.BLINK}


def generate_recording(profile: ScenarioProfile, aois: Sequence[Aoi], seed: int,
                       participant_id: str | None = None) -> GazeRecording:
    if not aois:
        raise ValueError("simulation needs at least one AOI")
    rng = np.random.default_rng(seed)
    n = int(round(profile.duration * profile.sample_rate))
    if n < 1:
        raise ValueError(f"duration {profile.duration}s at {profile.sample_rate} Hz gives no samples")
    t = np.arange(n) / profile.sample_rate
    x = np.empty(n)
    y = np.empty(n)
    mu, sigma = _lognormal_params(profile.mean_fixation_duration, profile.fixation_duration_cv)

    cx, cy = _pick_target(rng, profile, aois)
    i = 0
    first = True
    while i < n:
        if not first:
            tx, ty = _pick_target(rng, profile, aois)
            amp = math.hypot(tx - cx, ty - cy)
            # ~20 ms plus 2.5 ms per 100 px, at least one sample
            n_sac = max(1, int(round((0.02 + amp / 40000.0) * profile.sample_rate)))
            frac = (np.arange(n_sac) + 0.5) / n_sac
            ease = 0.5 - 0.5 * np.cos(np.pi * frac)
            k = min(n_sac, n - i)
            x[i:i + k] = cx + (tx - cx) * ease[:k]
            y[i:i + k] = cy + (ty - cy) * ease[:k]
            i += k
            cx, cy = tx, ty
        first = False
        dur = rng.lognormal(mu, sigma) if sigma > 0 else profile.mean_fixation_duration
        n_fix = max(1, int(round(dur * profile.sample_rate)))
        k = min(n_fix, n - i)
        x[i:i + k] = cx + rng.normal(0.0, profile.jitter_sd, k)
        y[i:i + k] = cy + rng.normal(0.0, profile.jitter_sd, k)
        i += k

    if profile.drift_rate > 0:
        x += profile.drift_rate * t / math.sqrt(2.0)
        y += profile.drift_rate * t / math.sqrt(2.0)
    np.clip(x, 0.0, profile.scene_width, out=x)
    np.clip(y, 0.0, profile.scene_height, out=y)

    validity = np.zeros(n, dtype=int)
    _mark_runs(rng, validity, t, profile.dropout_rate, 0.005, 0.035, _MISSING)
    _mark_runs(rng, validity, t, profile.blink_rate, 0.08, 0.25, _BLINK)
    x[validity != _VALID] = 0.0
    y[validity != _VALID] = 0.0

    if participant_id is None:
        participant_id = f"{profile.group.value}-{profile.scenario.value}-{seed}"
    samples = tuple(
        GazeSample(float(t[k]), float(x[k]), float(y[k]), _CODES[int(validity[k])]) for k in range(n)
    )
    return GazeRecording(participant_id, profile.group, profile.scenario, profile.sample_rate, samples)


def child_seeds(seed: int, count: int) -> list[int]:
    """Independent integer seeds derived from one master seed."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(count)]


def sample_labeled_points(recording: GazeRecording, aois: Sequence[Aoi], n: int, rng) -> list[LabeledPoint]:
    """Draw ``n`` Valid samples without replacement (kept in time order), labeled geometrically."""
    t, x, y, valid = recording.arrays()
    idx = np.flatnonzero(valid)
    if n > len(idx):
        raise ValueError(f"asked for {n} points but the recording has only {len(idx)} Valid samples")
    pick = np.sort(rng.choice(idx, size=n, replace=False))
    labels = label_array(aois, x[pick], y[pick])
    return [LabeledPoint(float(x[k]), float(y[k]), int(lab), float(t[k])) for k, lab in zip(pick, labels)]


def generate_dataset(profiles: Sequence[ScenarioProfile], aois: Sequence[Aoi], n_per_profile: int,
                     seed: int) -> list[LabeledPoint]:
    if n_per_profile < 1:
        raise ValueError(f"n_per_profile must be >= 1, got {n_per_profile}")
    seeds = child_seeds(seed, len(profiles))
    rng = np.random.default_rng(seed)
    points: list[LabeledPoint] = []
    for profile, s in zip(profiles, seeds):
        rec = generate_recording(profile, aois, s)
        points.extend(sample_labeled_points(rec, aois, n_per_profile, rng))
    return points
