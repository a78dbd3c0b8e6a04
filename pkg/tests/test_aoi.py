import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_recording
from gazeseev.aoi import (boundary_distance, dwell_from_labels, dwell_times, label_array, label_point,
                          label_recording, sample_labels, write_dwell_csv)
from gazeseev.core import Aoi, GazeRecording, GazeSample, Group, Scenario, Validity
from gazeseev.simgen import DEFAULT_AOIS, default_profile, generate_recording

AREA1 = Aoi(1, 100, 100, 300, 200)
AREA2 = Aoi(2, 400, 100, 600, 200)
TWO = [AREA1, AREA2]


@pytest.mark.parametrize("pt, label", [
    ((150, 150), 1), ((50, 50), 0), ((100, 100), 1), ((300, 200), 0),
    ((299.999, 199.999), 1), ((300, 150), 0), ((450, 100), 2), ((350, 150), 0),
])
def test_label_point_examples(pt, label):
    assert label_point(TWO, *pt) == label


def test_overlap_goes_to_first_in_list():
    a, b = Aoi(1, 0, 0, 10, 10), Aoi(2, 5, 5, 20, 20)
    assert label_point([a, b], 7, 7) == 1
    assert label_point([b, a], 7, 7) == 2


def test_label_array_matches_pointwise():
    rng = np.random.default_rng(2)
    x = rng.uniform(0, 700, 2000)
    y = rng.uniform(0, 300, 2000)
    # include exact edge coordinates
    x[:4] = [100, 300, 400, 600]
    y[:4] = [100, 200, 100, 200]
    ref = [label_point(TWO, a, b) for a, b in zip(x, y)]
    assert label_array(TWO, x, y).tolist() == ref


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 700), st.floats(0, 300)), min_size=1, max_size=30))
def test_disjoint_aoi_order_does_not_matter(pts):
    for x, y in pts:
        assert label_point(TWO, x, y) == label_point(TWO[::-1], x, y)


def test_label_recording_all_inside_area2():
    rec = make_recording([450, 500, 550], [150, 150, 150])
    assert [p.label for p in label_recording(TWO, rec)] == [2, 2, 2]


def test_label_recording_excludes_non_valid():
    rec = make_recording([150] * 5, [150] * 5, validity="vbvbv")
    pts = label_recording(TWO, rec)
    assert len(pts) == 3
    assert [p.t for p in pts] == [0.0, 0.02, 0.04]


def test_label_recording_mixed_pointwise():
    rec = generate_recording(default_profile(Scenario.COLLABORATIVE, Group.ADHD_MEDIUM).with_overrides(duration=5.0),
                             DEFAULT_AOIS, seed=4)
    pts = label_recording(DEFAULT_AOIS, rec)
    valid = [s for s in rec.samples if s.is_valid]
    assert [p.label for p in pts] == [label_point(DEFAULT_AOIS, s.x, s.y) for s in valid]
    assert {p.label for p in pts} == {0, 1, 2}


def test_dwell_hand_cases():
    r = dwell_from_labels([0, 1, 2], [1, 1, 0])
    assert r.durations == {0: 0.0, 1: 2.0}
    r = dwell_from_labels([0, 1, 2, 3], [1, 2, 1, 2])
    assert r.durations == {0: 0.0, 1: 2.0, 2: 1.0}
    assert r.proportion(1) == pytest.approx(2 / 3)


def test_dwell_all_inside_one_aoi():
    rec = make_recording([150.0] * 20, [150.0] * 20)
    r = dwell_times(TWO, rec)
    assert r.proportion(1) == 1.0
    assert r.durations[2] == 0.0 and r.durations[0] == 0.0


def test_non_valid_dwell_goes_to_zero():
    rec = make_recording([150.0] * 4, [150.0] * 4, validity="vbbv")
    r = dwell_times(TWO, rec)
    assert r.durations[1] == pytest.approx(0.01)
    assert r.durations[0] == pytest.approx(0.02)


def test_dwell_needs_two_samples():
    with pytest.raises(ValueError):
        dwell_times(TWO, make_recording([1.0]))


def _random_recording(rng, n):
    t = np.cumsum(rng.uniform(0.001, 0.05, n)) + rng.uniform(0, 1000)
    codes = rng.choice([Validity.VALID] * 5 + [Validity.BLINK], n)
    samples = []
    for k in range(n):
        v = codes[k]
        x, y = (rng.uniform(0, 700), rng.uniform(0, 300)) if v is Validity.VALID else (0.0, 0.0)
        samples.append(GazeSample(float(t[k]), x, y, v))
    return GazeRecording("r", Group.CONTROL, Scenario.INFO_RETRIEVAL, 50.0, tuple(samples))


@pytest.mark.parametrize("seed", range(20))
def test_conservation_and_proportions(seed):
    rng = np.random.default_rng(seed)
    rec = _random_recording(rng, int(rng.integers(2, 400)))
    r = dwell_times(TWO, rec)
    span = rec.samples[-1].t - rec.samples[0].t
    assert math.isclose(math.fsum(r.durations.values()), span, rel_tol=1e-9)
    assert math.isclose(sum(r.proportions.values()), 1.0, abs_tol=1e-12)
    assert all(d >= 0 for d in r.durations.values())
    assert set(r.durations) == {0, 1, 2}


def test_translation_invariance():
    rng = np.random.default_rng(9)
    rec = _random_recording(rng, 200)
    shifted = rec.with_samples(tuple(GazeSample(s.t + 37.0, s.x, s.y, s.validity) for s in rec.samples))
    a, b = dwell_times(TWO, rec), dwell_times(TWO, shifted)
    for lab in a.durations:
        assert b.durations[lab] == pytest.approx(a.durations[lab], rel=1e-9, abs=1e-9)


def test_brute_force_dwell_oracle():
    rng = random.Random(5)
    t = sorted(rng.sample(range(1, 10000), 300))
    labels = [rng.choice([0, 1, 2]) for _ in t]
    ref = {0: 0, 1: 0, 2: 0}
    for i in range(len(t) - 1):
        ref[labels[i]] += t[i + 1] - t[i]
    r = dwell_from_labels([v / 1000 for v in t], labels)
    for lab in ref:
        assert r.durations[lab] == pytest.approx(ref[lab] / 1000, abs=1e-9)


def test_sample_labels_zero_for_blinks():
    rec = make_recording([150, 150, 450], [150, 150, 150], validity="vbv")
    assert sample_labels(TWO, rec).tolist() == [1, 0, 2]


def test_boundary_distance():
    d = boundary_distance([AREA1], np.array([200.0, 100.0, 50.0, 320.0]), np.array([150.0, 150.0, 150.0, 220.0]))
    assert d.tolist() == pytest.approx([50.0, 0.0, 50.0, math.hypot(20, 20)])


def test_dwell_csv(tmp_path):
    p = tmp_path / "d.csv"
    write_dwell_csv(dwell_from_labels([0, 1, 2, 3], [1, 2, 1, 2]), p)
    lines = p.read_text().splitlines()
    assert lines[0] == "label,duration_s,proportion"
    assert lines[2].startswith("1,2,0.6666")
