"""Command-line entry point.

Every option can also be set through an environment variable named
``GSL_<OPTION>`` (upper case, dashes as underscores), e.g. ``GSL_SEED=7``.
An explicit flag always wins over the environment.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import aoi as aoi_mod
from . import seev as seev_mod
from .core import Group, Scenario, read_aoi_config, read_gaze_csv, write_gaze_csv
from .events import EventConfig, detect_fixations, detect_saccades, extract_features, write_events_csv
from .pipeline import (FEATURE_METRICS, DemoConfig, StatRow, check_metric, compare_groups, metric_value,
                       predicted_sample_labels, run_demo, subsample, write_stats_csv)
from .preprocess import preprocess, read_calibration_file
from .simgen import DEFAULT_AOIS, default_profile, generate_recording
from .stats import TTestVariant
from .svm import (DEFAULT_C_GRID, DEFAULT_GAMMA_GRID, classification_metrics, fit_best, grid_search,
                  load_model, save_model, write_grid_csv)
from .svm.multiclass import point_features

log = logging.getLogger("gazeseev")

ENV_PREFIX = "GSL_"


class ConfigError(Exception):
    """Invalid configuration; reported with exit status 2."""


# -- argument types -------------------------------------------------------

def _type(check, message):
    def convert(text):
        try:
            value = check(text)
        except (TypeError, ValueError):
            value = None
        if value is None:
            raise argparse.ArgumentTypeError(f"{message}, got {text!r}")
        return value
    convert.__name__ = message
    return convert


def _odd_positive_int(text):
    v = int(text)
    return v if v >= 1 and v % 2 == 1 else None


def _positive_int(text):
    v = int(text)
    return v if v >= 1 else None


def _positive_float(text):
    v = float(text)
    return v if v > 0 and np.isfinite(v) else None


def _non_negative_float(text):
    v = float(text)
    return v if v >= 0 and np.isfinite(v) else None


def _fraction(text):
    v = float(text)
    return v if 0 < v < 1 else None


def _probability(text):
    v = float(text)
    return v if 0 <= v <= 1 else None


odd_positive_int = _type(_odd_positive_int, "must be an odd positive integer")
positive_int = _type(_positive_int, "must be a positive integer")
positive_float = _type(_positive_float, "must be a positive number")
non_negative_float = _type(_non_negative_float, "must be a non-negative number")
fraction = _type(_fraction, "must lie strictly between 0 and 1")
probability = _type(_probability, "must lie in [0, 1]")


# -- shared option groups -------------------------------------------------

def _add_preprocess(p):
    g = p.add_argument_group("preprocessing")
    g.add_argument("--median-window", type=odd_positive_int, default=3, metavar="N",
                   help="median filter window in samples, odd (default: 3; 1 disables)")
    g.add_argument("--max-gap-ms", type=positive_float, default=75.0, metavar="MS",
                   help="longest Missing gap to interpolate, milliseconds (default: 75)")
    g.add_argument("--calibration", type=Path, metavar="FILE",
                   help="drift calibration windows, lines 't_start_s t_end_s target_x_px target_y_px'")


def _add_events(p):
    g = p.add_argument_group("event detection")
    g.add_argument("--dispersion-px", type=positive_float, default=35.0, metavar="PX",
                   help="fixation dispersion threshold, pixels (default: 35)")
    g.add_argument("--min-fixation-ms", type=positive_float, default=60.0, metavar="MS",
                   help="minimum fixation duration, milliseconds (default: 60)")
    g.add_argument("--saccade-velocity", type=positive_float, default=1500.0, metavar="PX_PER_S",
                   help="saccade velocity threshold, pixels/second (default: 1500)")


def _add_grid(p):
    g = p.add_argument_group("SVM grid search")
    g.add_argument("--c-grid", type=positive_float, nargs="+", default=list(DEFAULT_C_GRID), metavar="C",
                   help="regularization values C, unitless (default: 26.5 .. 28 in steps of 0.25)")
    g.add_argument("--gamma-grid", type=positive_float, nargs="+", default=list(DEFAULT_GAMMA_GRID), metavar="G",
                   help="RBF gamma values, 1/pixel^2 (default: 2^-14.5 .. 2^-16 in steps of 2^-0.25)")
    g.add_argument("--holdout", type=fraction, default=0.2, metavar="FRAC",
                   help="stratified hold-out fraction, 0..1 exclusive (default: 0.2)")
    g.add_argument("--jobs", type=positive_int, default=1, metavar="N",
                   help="worker processes for grid cells, count (default: 1)")


def _add_seed(p, default=0):
    p.add_argument("--seed", type=int, default=default, metavar="N", help=f"random seed, integer (default: {default})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gazeseev", description=__doc__.split("\n\n")[0],
                                     epilog="Any option may be set via GSL_<OPTION> environment variables.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more log output (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("simulate", help="generate a synthetic gaze recording")
    p.add_argument("--scenario", choices=[s.value for s in Scenario], default="info_retrieval",
                   help="dual-task scenario (default: info_retrieval)")
    p.add_argument("--group", choices=[g.value for g in Group], default="control",
                   help="participant group (default: control)")
    p.add_argument("--duration", type=positive_float, default=60.0, metavar="SEC",
                   help="recording length, seconds (default: 60)")
    p.add_argument("--sample-rate", type=positive_float, default=100.0, metavar="HZ",
                   help="sampling rate, Hz (default: 100)")
    _add_seed(p)
    p.add_argument("--aoi", type=Path, metavar="FILE", help="AOI config (default: built-in two-area layout)")
    p.add_argument("--out", type=Path, required=True, metavar="CSV", help="output gaze CSV")
    p.add_argument("--participant-id", metavar="ID", help="participant id written to the CSV")
    g = p.add_argument_group("profile overrides")
    g.add_argument("--attend-prob", type=probability, metavar="P",
                   help="probability a fixation lands in a task AOI, 0..1")
    g.add_argument("--mean-fixation-ms", type=positive_float, metavar="MS", help="mean fixation duration, milliseconds")
    g.add_argument("--fixation-cv", type=non_negative_float, metavar="CV",
                   help="fixation duration coefficient of variation, unitless")
    g.add_argument("--jitter-px", type=non_negative_float, metavar="PX", help="within-fixation noise SD, pixels")
    g.add_argument("--blink-rate", type=non_negative_float, metavar="PER_MIN", help="blinks per minute")
    g.add_argument("--drift-rate", type=non_negative_float, metavar="PX_PER_S", help="linear drift, pixels/second")
    g.add_argument("--dropout-rate", type=non_negative_float, metavar="PER_MIN",
                   help="short tracking dropouts per minute")

    p = sub.add_parser("preprocess", help="gap interpolation, median filter and drift correction")
    p.add_argument("--input", type=Path, required=True, metavar="CSV", help="input gaze CSV")
    p.add_argument("--out", type=Path, required=True, metavar="CSV", help="output gaze CSV")
    _add_preprocess(p)

    p = sub.add_parser("events", help="detect fixations/saccades and extract features")
    p.add_argument("--input", type=Path, required=True, metavar="CSV", help="input gaze CSV")
    p.add_argument("--out", type=Path, required=True, metavar="CSV", help="event list CSV (type,t_start,t_end,a,b)")
    p.add_argument("--features-out", type=Path, metavar="CSV", help="feature vector CSV")
    _add_preprocess(p)
    _add_events(p)

    p = sub.add_parser("label", help="label Valid samples by AOI")
    p.add_argument("--input", type=Path, required=True, metavar="CSV", help="input gaze CSV")
    p.add_argument("--aoi", type=Path, required=True, metavar="FILE", help="AOI config")
    p.add_argument("--out", type=Path, required=True, metavar="CSV", help="labeled points CSV (t,x,y,label)")
    _add_preprocess(p)

    p = sub.add_parser("train", help="grid-search and train the RBF SVM")
    p.add_argument("--input", type=Path, nargs="+", required=True, metavar="CSV", help="gaze CSV file(s)")
    p.add_argument("--aoi", type=Path, required=True, metavar="FILE", help="AOI config for ground-truth labels")
    p.add_argument("--model-out", type=Path, required=True, metavar="FILE", help="trained model file")
    p.add_argument("--grid-out", type=Path, metavar="CSV", help="grid report CSV (c,gamma,accuracy)")
    p.add_argument("--metrics-out", type=Path, metavar="CSV", help="hold-out metrics CSV for the best cell")
    p.add_argument("--max-points", type=positive_int, default=2000, metavar="N",
                   help="cap on labeled points used, count (default: 2000)")
    p.add_argument("--with-time", action="store_true", help="add the timestamp (s) as a third feature")
    p.add_argument("--normalize", action="store_true", help="z-score features before the kernel")
    _add_seed(p)
    _add_grid(p)
    _add_preprocess(p)

    p = sub.add_parser("predict", help="classify samples with a trained model")
    p.add_argument("--model", type=Path, required=True, metavar="FILE", help="model file from 'train'")
    p.add_argument("--input", type=Path, required=True, metavar="CSV", help="input gaze CSV")
    p.add_argument("--out", type=Path, required=True, metavar="CSV", help="predictions CSV (t,x,y,label)")
    p.add_argument("--dwell-out", type=Path, metavar="CSV", help="dwell report from predicted labels")
    _add_preprocess(p)

    p = sub.add_parser("dwell", help="per-AOI dwell time report")
    p.add_argument("--input", type=Path, required=True, metavar="CSV", help="input gaze CSV")
    p.add_argument("--aoi", type=Path, required=True, metavar="FILE", help="AOI config")
    p.add_argument("--model", type=Path, metavar="FILE", help="use SVM predictions instead of geometry")
    p.add_argument("--out", type=Path, required=True, metavar="CSV", help="dwell CSV (label,duration_s,proportion)")
    _add_preprocess(p)

    p = sub.add_parser("seev", help="SEEV prediction versus observed dwell")
    p.add_argument("--params", type=Path, required=True, metavar="FILE",
                   help="SEEV file: 'aoi_label S EF EX V' lines plus 'weights s ef ex v'")
    p.add_argument("--input", type=Path, required=True, metavar="CSV", help="input gaze CSV")
    p.add_argument("--aoi", type=Path, required=True, metavar="FILE", help="AOI config")
    p.add_argument("--model", type=Path, metavar="FILE", help="use SVM predictions for observed dwell")
    p.add_argument("--out", type=Path, required=True, metavar="CSV", help="report CSV (aoi_label,predicted_p,observed_p)")
    _add_preprocess(p)

    p = sub.add_parser("stats", help="group comparison over a directory of recordings")
    p.add_argument("--input-dir", type=Path, required=True, metavar="DIR", help="directory of gaze CSV files")
    p.add_argument("--aoi", type=Path, required=True, metavar="FILE", help="AOI config")
    p.add_argument("--metric", action="append", metavar="NAME",
                   help=f"dwell_prop:<label> (fraction) or one of {', '.join(FEATURE_METRICS)}; repeatable")
    p.add_argument("--group-by", choices=["group", "scenario"], default="group", help="grouping field (default: group)")
    p.add_argument("--groups", nargs="+", metavar="NAME", help="restrict to these group values")
    p.add_argument("--test", choices=["anova", "t"], default="anova", help="test to run (default: anova)")
    p.add_argument("--variant", choices=[v.value for v in TTestVariant], default="welch",
                   help="t-test variant (default: welch)")
    p.add_argument("--out", type=Path, required=True, metavar="CSV", help="output CSV (metric,test,statistic,df,p)")
    _add_preprocess(p)
    _add_events(p)

    p = sub.add_parser("demo", help="end-to-end run on simulated data")
    _add_seed(p, 42)
    p.add_argument("--out-dir", type=Path, default=Path("demo_out"), metavar="DIR",
                   help="report directory (default: demo_out)")
    p.add_argument("--duration", type=positive_float, default=60.0, metavar="SEC",
                   help="length of each simulated recording, seconds (default: 60)")
    p.add_argument("--sample-rate", type=positive_float, default=100.0, metavar="HZ",
                   help="sampling rate, Hz (default: 100)")
    p.add_argument("--points-per-recording", type=positive_int, default=150, metavar="N",
                   help="labeled points drawn per recording for training, count (default: 150)")
    _add_grid(p)
    _add_preprocess(p)
    _add_events(p)

    _apply_env_defaults(parser)
    return parser


def _subparsers(parser):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices
    return {}


def _apply_env_defaults(parser: argparse.ArgumentParser, environ=None) -> None:
    """Seed option defaults from GSL_* variables; values go through the option's own type check."""
    environ = os.environ if environ is None else environ
    for name, sp in _subparsers(parser).items():
        for action in sp._actions:
            if not action.option_strings or action.dest in ("help",):
                continue
            key = ENV_PREFIX + action.dest.upper()
            if key not in environ:
                continue
            raw = environ[key]
            if isinstance(action, argparse._StoreTrueAction):
                value = raw.strip().lower() in ("1", "true", "yes", "on")
            else:
                try:
                    convert = action.type or str
                    if action.nargs in ("+", "*"):
                        value = [convert(tok) for tok in raw.replace(",", " ").split()]
                    else:
                        value = convert(raw)
                    if action.choices is not None and value not in action.choices:
                        raise argparse.ArgumentTypeError(f"must be one of {', '.join(map(str, action.choices))}")
                except argparse.ArgumentTypeError as exc:
                    sp.error(f"environment {key} (for {action.option_strings[0]}): {exc}")
            action.default = value
            action.required = False


# -- helpers --------------------------------------------------------------

def _preprocessed(path: Path, args):
    rec = read_gaze_csv(path)
    cal = read_calibration_file(args.calibration) if args.calibration else ()
    if args.median_window > len(rec):
        raise ConfigError(f"--median-window {args.median_window} exceeds the {len(rec)} samples in {path}")
    return preprocess(rec, args.median_window, args.max_gap_ms / 1000.0, cal)


def _event_config(args) -> EventConfig:
    return EventConfig(args.dispersion_px, args.min_fixation_ms / 1000.0, args.saccade_velocity)


def _f(v) -> str:
    return format(float(v), ".17g")


def _write_points(path: Path, t, x, y, labels) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "x", "y", "label"])
        for row in zip(t, x, y, labels):
            w.writerow([_f(row[0]), _f(row[1]), _f(row[2]), int(row[3])])


def _observed_dwell(args, rec):
    aois = read_aoi_config(args.aoi)
    if getattr(args, "model", None):
        model = load_model(args.model)
        t = np.array([s.t for s in rec.samples])
        return aoi_mod.dwell_from_labels(t, predicted_sample_labels(model, rec), [a.label for a in aois])
    return aoi_mod.dwell_times(aois, rec)


# -- commands -------------------------------------------------------------

def cmd_simulate(args):
    aois = read_aoi_config(args.aoi) if args.aoi else list(DEFAULT_AOIS)
    profile = default_profile(Scenario(args.scenario), Group(args.group)).with_overrides(
        duration=args.duration, sample_rate=args.sample_rate, attend_target_prob=args.attend_prob,
        mean_fixation_duration=None if args.mean_fixation_ms is None else args.mean_fixation_ms / 1000.0,
        fixation_duration_cv=args.fixation_cv, jitter_sd=args.jitter_px, blink_rate=args.blink_rate,
        drift_rate=args.drift_rate, dropout_rate=args.dropout_rate,
    )
    rec = generate_recording(profile, aois, args.seed, participant_id=args.participant_id)
    write_gaze_csv(rec, args.out)
    log.info("wrote %d samples to %s", len(rec), args.out)


def cmd_preprocess(args):
    write_gaze_csv(_preprocessed(args.input, args), args.out)


def cmd_events(args):
    rec = _preprocessed(args.input, args)
    cfg = _event_config(args)
    write_events_csv(detect_fixations(rec, cfg.dispersion_px, cfg.min_fixation_s),
                     detect_saccades(rec, cfg.saccade_velocity), args.out)
    if args.features_out:
        fv = extract_features(rec, cfg).as_dict()
        with args.features_out.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["participant_id"] + list(fv))
            w.writerow([rec.participant_id] + [_f(v) for v in fv.values()])


def cmd_label(args):
    rec = _preprocessed(args.input, args)
    pts = aoi_mod.label_recording(read_aoi_config(args.aoi), rec)
    _write_points(args.out, [p.t for p in pts], [p.x for p in pts], [p.y for p in pts], [p.label for p in pts])


def cmd_train(args):
    aois = read_aoi_config(args.aoi)
    points = []
    for path in args.input:
        points.extend(aoi_mod.label_recording(aois, _preprocessed(path, args)))
    points = subsample(points, args.max_points, args.seed)
    log.info("training on %d labeled points", len(points))
    result = grid_search(points, args.c_grid, args.gamma_grid, args.holdout, args.seed,
                         use_time=args.with_time, normalize=args.normalize, n_jobs=args.jobs)
    if args.grid_out:
        write_grid_csv(result, args.grid_out)
    model = fit_best(points, result, use_time=args.with_time, normalize=args.normalize)
    save_model(model, args.model_out)
    X, y = point_features(points, args.with_time)
    hold = np.array(result.holdout_indices, dtype=int)
    m = classification_metrics(y[hold], model.predict_many(X[hold]))
    if args.metrics_out:
        with args.metrics_out.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["c", "gamma", "accuracy", "precision", "recall", "f1"])
            w.writerow([_f(result.best[0]), _f(result.best[1]), _f(m.accuracy), _f(m.precision), _f(m.recall),
                        _f(m.f1)])
    print(f"best C={result.best[0]:g} gamma={result.best[1]:.6g} hold-out accuracy={m.accuracy:.4f} "
          f"precision={m.precision:.4f} recall={m.recall:.4f} f1={m.f1:.4f}")


def cmd_predict(args):
    model = load_model(args.model)
    rec = _preprocessed(args.input, args)
    labels = predicted_sample_labels(model, rec)
    t, x, y, valid = rec.arrays()
    _write_points(args.out, t[valid], x[valid], y[valid], labels[valid])
    if args.dwell_out:
        aoi_mod.write_dwell_csv(aoi_mod.dwell_from_labels(t, labels, model.classes), args.dwell_out)


def cmd_dwell(args):
    rec = _preprocessed(args.input, args)
    aoi_mod.write_dwell_csv(_observed_dwell(args, rec), args.out)


def cmd_seev(args):
    params = seev_mod.read_seev_params(args.params)
    rec = _preprocessed(args.input, args)
    cmp = seev_mod.compare(seev_mod.seev_scores(params), _observed_dwell(args, rec))
    seev_mod.write_seev_report(cmp, args.out)
    r = "undefined" if cmp.pearson_r is None else f"{cmp.pearson_r:.4f}"
    print(f"total_variation={cmp.total_variation:.4f} pearson_r={r}")


def cmd_stats(args):
    metrics = args.metric or ["dwell_prop:0"]
    try:
        for m in metrics:
            check_metric(m)
    except ValueError as exc:
        raise ConfigError(f"--metric: {exc}") from None
    files = sorted(args.input_dir.glob("*.csv"))
    if not files:
        raise ValueError(f"no .csv recordings in {args.input_dir}")
    aois = read_aoi_config(args.aoi)
    cfg = _event_config(args)
    recs = [_preprocessed(f, args) for f in files]
    rows: list[StatRow] = []
    for m in metrics:
        by_group: dict[str, list[float]] = {}
        for rec in recs:
            key = getattr(rec, args.group_by).value
            if args.groups and key not in args.groups:
                continue
            by_group.setdefault(key, []).append(metric_value(rec, m, aois, cfg))
        rows.append(compare_groups(by_group, m, args.test, TTestVariant(args.variant)))
    write_stats_csv(rows, args.out)


def cmd_demo(args):
    cfg = DemoConfig(
        seed=args.seed, out_dir=args.out_dir, duration=args.duration, sample_rate=args.sample_rate,
        points_per_recording=args.points_per_recording, c_grid=args.c_grid, gamma_grid=args.gamma_grid,
        holdout=args.holdout, jobs=args.jobs, median_window=args.median_window, max_gap=args.max_gap_ms / 1000.0,
        events=_event_config(args),
    )
    summary = run_demo(cfg)
    m = summary["metrics"]
    print(f"{summary['recordings']} recordings, {summary['training_points']} training points, "
          f"{summary['grid_cells']} grid cells; best C={summary['best'][0]:g} gamma={summary['best'][1]:.6g}; "
          f"hold-out accuracy={m.accuracy:.4f} f1={m.f1:.4f}; reports in {cfg.out_dir}")


COMMANDS = {
    "simulate": cmd_simulate, "preprocess": cmd_preprocess, "events": cmd_events, "label": cmd_label,
    "train": cmd_train, "predict": cmd_predict, "dwell": cmd_dwell, "seev": cmd_seev, "stats": cmd_stats,
    "demo": cmd_demo,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"gazeseev {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, ArithmeticError, RuntimeError) as exc:
        print(f"gazeseev {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
