"""Stage wiring used by the CLI: per-recording metrics, group statistics and the demo run."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import aoi as aoi_mod
from . import seev as seev_mod
from .core import Aoi, GazeRecording, Group, LabeledPoint, Scenario, write_aoi_config, write_gaze_csv
from .events import EventConfig, extract_features
from .preprocess import DEFAULT_MAX_GAP, DEFAULT_MEDIAN_WINDOW, preprocess
from .simgen import DEFAULT_AOIS, child_seeds, default_profile, generate_recording, sample_labeled_points
from .stats import TTestVariant, one_way_anova, t_test
from .svm import (DEFAULT_C_GRID, DEFAULT_GAMMA_GRID, classification_metrics, fit_best, grid_search,
                  save_model, write_grid_csv)
from .svm.multiclass import SvmModel, point_features

log = logging.getLogger(__name__)

FEATURE_METRICS = ("fixation_count", "mean_fixation_duration", "saccade_count", "mean_saccade_amplitude",
                   "blink_rate")

ORACLE_MARGIN_PX = 20.0

DEMO_SEEV = seev_mod.SeevParams({
    1: seev_mod.AoiFactors(salience=0.5, effort=0.2, expectancy=0.8, value=0.9),
    2: seev_mod.AoiFactors(salience=0.8, effort=0.4, expectancy=0.5, value=0.6),
})


def _f(v: float) -> str:
    return format(float(v), ".17g")


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def check_metric(metric: str) -> str:
    if metric in FEATURE_METRICS:
        return metric
    if metric.startswith("dwell_prop:"):
        try:
            int(metric.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad metric {metric!r}: dwell_prop needs an integer label") from None
        return metric
    raise ValueError(f"unknown metric {metric!r} (use dwell_prop:<label> or one of {', '.join(FEATURE_METRICS)})")


def metric_value(recording: GazeRecording, metric: str, aois: Sequence[Aoi], config: EventConfig) -> float:
    check_metric(metric)
    if metric.startswith("dwell_prop:"):
        label = int(metric.split(":", 1)[1])
        return aoi_mod.dwell_times(aois, recording).proportion(label)
    return float(getattr(extract_features(recording, config), metric))


@dataclass
class StatRow:
    metric: str
    test: str
    statistic: float | None
    df: str
    p: float | None


def compare_groups(values_by_group: dict[str, list[float]], metric: str, test: str,
                   variant: TTestVariant = TTestVariant.WELCH) -> StatRow:
    groups = [values_by_group[k] for k in sorted(values_by_group)]
    try:
        if test == "anova":
            r = one_way_anova(groups)
            return StatRow(metric, "anova", r.f, f"{r.df_between}/{r.df_within}", r.p)
        if len(groups) != 2:
            raise ValueError(f"t-test needs exactly 2 groups, got {len(groups)}")
        r = t_test(groups[0], groups[1], variant)
        return StatRow(metric, f"t_{r.variant.value}", r.t, _f(r.df), r.p)
    except ValueError as exc:
        log.warning("%s %s: %s", metric, test, exc)
        return StatRow(metric, test if test == "anova" else f"t_{variant.value}", None, "", None)


def write_stats_csv(rows: Sequence[StatRow], path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = _writer(fh)
        w.writerow(["metric", "test", "statistic", "df", "p"])
        for r in rows:
            w.writerow([r.metric, r.test, "" if r.statistic is None else _f(r.statistic), r.df,
                        "" if r.p is None else _f(r.p)])


def predicted_sample_labels(model: SvmModel, recording: GazeRecording) -> np.ndarray:
    """SVM label per sample; non-Valid samples get 0."""
    t, x, y, valid = recording.arrays()
    labels = np.zeros(len(t), dtype=int)
    if valid.any():
        X = np.column_stack([x, y, t] if model.use_time else [x, y])[valid]
        labels[valid] = model.predict_many(X)
    return labels


def subsample(points: list[LabeledPoint], max_points: int, seed: int) -> list[LabeledPoint]:
    if len(points) <= max_points:
        return points
    pick = np.sort(np.random.default_rng(seed).choice(len(points), size=max_points, replace=False))
    return [points[i] for i in pick]


@dataclass
class DemoConfig:
    seed: int = 42
    out_dir: Path = Path("demo_out")
    duration: float = 60.0
    sample_rate: float = 100.0
    points_per_recording: int = 150
    c_grid: Sequence[float] = DEFAULT_C_GRID
    gamma_grid: Sequence[float] = DEFAULT_GAMMA_GRID
    holdout: float = 0.2
    jobs: int = 1
    median_window: int = DEFAULT_MEDIAN_WINDOW
    max_gap: float = DEFAULT_MAX_GAP
    events: EventConfig = field(default_factory=EventConfig)
    aois: Sequence[Aoi] = DEFAULT_AOIS
    seev: seev_mod.SeevParams = DEMO_SEEV


def run_demo(cfg: DemoConfig) -> dict:
    """Simulate, preprocess, extract features, train, predict, and report; returns a summary dict."""
    out = Path(cfg.out_dir)
    (out / "recordings").mkdir(parents=True, exist_ok=True)
    write_aoi_config(cfg.aois, out / "aois.txt")
    seev_mod.write_seev_params(cfg.seev, out / "seev_params.txt")

    profiles = [default_profile(s, g).with_overrides(duration=cfg.duration, sample_rate=cfg.sample_rate)
                for s in Scenario for g in Group]
    seeds = child_seeds(cfg.seed, len(profiles))
    rng = np.random.default_rng(cfg.seed)

    recordings = []
    points: list[LabeledPoint] = []
    for profile, s in zip(profiles, seeds):
        raw = generate_recording(profile, cfg.aois, s, participant_id=f"{profile.group.value}_{profile.scenario.value}")
        write_gaze_csv(raw, out / "recordings" / f"{raw.participant_id}.csv")
        rec = preprocess(raw, cfg.median_window, cfg.max_gap)
        recordings.append(rec)
        points.extend(sample_labeled_points(rec, cfg.aois, cfg.points_per_recording, rng))
    log.info("simulated %d recordings, %d labeled points", len(recordings), len(points))

    with (out / "features.csv").open("w", newline="") as fh:
        w = _writer(fh)
        w.writerow(["participant_id", "group", "scenario"] + list(FEATURE_METRICS))
        for rec in recordings:
            fv = extract_features(rec, cfg.events).as_dict()
            w.writerow([rec.participant_id, rec.group.value, rec.scenario.value] + [_f(fv[k]) for k in FEATURE_METRICS])

    result = grid_search(points, cfg.c_grid, cfg.gamma_grid, cfg.holdout, cfg.seed, n_jobs=cfg.jobs)
    write_grid_csv(result, out / "grid.csv")
    model = fit_best(points, result)
    save_model(model, out / "model.txt")
    X, y = point_features(points)
    hold = np.array(result.holdout_indices, dtype=int)
    pred_hold = model.predict_many(X[hold])
    m = classification_metrics(y[hold], pred_hold)
    # agreement with the geometric labels on hold-out points well clear of every AOI edge
    far = aoi_mod.boundary_distance(cfg.aois, X[hold, 0], X[hold, 1]) >= ORACLE_MARGIN_PX
    agreement = float(np.mean(pred_hold[far] == y[hold][far])) if far.any() else float("nan")
    with (out / "metrics.csv").open("w", newline="") as fh:
        w = _writer(fh)
        w.writerow(["c", "gamma", "accuracy", "precision", "recall", "f1", "far_points", "far_agreement"])
        w.writerow([_f(result.best[0]), _f(result.best[1]), _f(m.accuracy), _f(m.precision), _f(m.recall), _f(m.f1),
                    int(far.sum()), _f(agreement)])
    log.info("best cell C=%g gamma=%g hold-out accuracy %.4f", *result.best, m.accuracy)

    prediction = seev_mod.seev_scores(cfg.seev)
    labels = [a.label for a in cfg.aois]
    with (out / "dwell.csv").open("w", newline="") as dfh, \
            (out / "seev.csv").open("w", newline="") as sfh, \
            (out / "seev_summary.csv").open("w", newline="") as sumfh:
        dw, sw, sumw = _writer(dfh), _writer(sfh), _writer(sumfh)
        dw.writerow(["participant_id", "source", "label", "duration_s", "proportion"])
        sw.writerow(["participant_id", "source", "aoi_label", "predicted_p", "observed_p"])
        sumw.writerow(["participant_id", "source", "total_variation", "pearson_r"])
        for rec in recordings:
            t = np.array([s.t for s in rec.samples])
            reports = {
                "geometric": aoi_mod.dwell_times(cfg.aois, rec),
                "svm": aoi_mod.dwell_from_labels(t, predicted_sample_labels(model, rec), labels),
            }
            for source, report in reports.items():
                props = report.proportions
                for label, d in report.durations.items():
                    dw.writerow([rec.participant_id, source, label, _f(d), _f(props[label])])
                cmp = seev_mod.compare(prediction, report)
                for label, p, q in zip(cmp.labels, cmp.predicted, cmp.observed):
                    sw.writerow([rec.participant_id, source, label, _f(p), _f(q)])
                sumw.writerow([rec.participant_id, source, _f(cmp.total_variation),
                               "" if cmp.pearson_r is None else _f(cmp.pearson_r)])

    metrics = [f"dwell_prop:{k}" for k in [0] + labels] + list(FEATURE_METRICS)
    rows = []
    for metric in metrics:
        by_group: dict[str, list[float]] = {}
        for rec in recordings:
            by_group.setdefault(rec.group.value, []).append(metric_value(rec, metric, cfg.aois, cfg.events))
        rows.append(compare_groups(by_group, metric, "anova"))
        pair = {k: by_group[k] for k in (Group.CONTROL.value, Group.ADHD_HIGH.value)}
        rows.append(compare_groups(pair, metric, "t"))
    write_stats_csv(rows, out / "stats.csv")

    return {
        "recordings": len(recordings),
        "training_points": len(result.train_indices),
        "holdout_points": len(result.holdout_indices),
        "grid_cells": len(result.cells),
        "best": result.best,
        "metrics": m,
        "far_points": int(far.sum()),
        "far_agreement": agreement,
    }

