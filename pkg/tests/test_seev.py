import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gazeseev.aoi import DwellReport
from gazeseev.core import GazeFormatError
from gazeseev.seev import (AoiFactors, SeevParams, SeevPrediction, SeevWeights, compare, pearson, raw_scores,
                           read_seev_params, seev_scores, total_variation, write_seev_params, write_seev_report)

unit = st.one_of(st.just(0.0), st.floats(1e-6, 1.0))
factors_st = st.builds(AoiFactors, unit, unit, unit, unit)
weight = st.one_of(st.just(0.0), st.floats(1e-6, 10.0))
weights_st = st.builds(SeevWeights, weight, weight, weight, weight)


def test_identical_factors_split_evenly():
    f = AoiFactors(0.3, 0.2, 0.5, 0.9)
    assert seev_scores(SeevParams({1: f, 2: f})).probabilities == {1: 0.5, 2: 0.5}


def test_zero_weights_give_uniform():
    p = SeevParams({1: AoiFactors(1, 0, 1, 1), 2: AoiFactors(0, 0, 0, 0), 3: AoiFactors(1, 1, 1, 1)},
                   SeevWeights(0, 0, 0, 0))
    assert seev_scores(p).probabilities == {1: 1 / 3, 2: 1 / 3, 3: 1 / 3}


def test_salience_only():
    p = SeevParams({1: AoiFactors(1, 0, 0, 0), 2: AoiFactors(0, 0, 0, 0)}, SeevWeights(1, 0, 0, 0))
    assert seev_scores(p).probabilities == {1: 1.0, 2: 0.0}


def test_effort_clamps_to_zero():
    p = SeevParams({1: AoiFactors(0.2, 1.0, 0, 0), 2: AoiFactors(0.5, 0, 0.5, 0)})
    assert raw_scores(p)[1] == pytest.approx(-0.8)
    assert seev_scores(p).probabilities == {1: 0.0, 2: 1.0}


def test_hand_formula():
    p = SeevParams({1: AoiFactors(0.5, 0.2, 0.8, 0.9), 2: AoiFactors(0.8, 0.4, 0.5, 0.6)}, SeevWeights(1, 2, 1, 0.5))
    r1 = 0.5 - 0.4 + 0.8 + 0.45
    r2 = 0.8 - 0.8 + 0.5 + 0.3
    probs = seev_scores(p).probabilities
    assert probs[1] == pytest.approx(r1 / (r1 + r2), rel=1e-15)
    assert probs[2] == pytest.approx(r2 / (r1 + r2), rel=1e-15)


@pytest.mark.parametrize("bad", [-0.1, 1.1, math.nan])
def test_factor_range(bad):
    with pytest.raises(ValueError):
        AoiFactors(bad, 0, 0, 0)


def test_weight_and_aoi_validation():
    with pytest.raises(ValueError):
        SeevWeights(-1, 0, 0, 0)
    with pytest.raises(ValueError):
        SeevParams({})


@settings(max_examples=200, deadline=None)
@given(st.dictionaries(st.integers(1, 20), factors_st, min_size=1, max_size=8), weights_st)
def test_output_is_distribution(factors, weights):
    probs = list(seev_scores(SeevParams(factors, weights)).probabilities.values())
    assert all(p >= 0 for p in probs)
    assert abs(math.fsum(probs) - 1.0) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(st.dictionaries(st.integers(1, 6), factors_st, min_size=1, max_size=6), weights_st,
       st.sampled_from(["salience", "effort", "expectancy", "value"]), st.floats(0.0, 1.0), st.data())
def test_single_factor_monotonicity(factors, weights, name, new, data):
    label = data.draw(st.sampled_from(sorted(factors)))
    old_f = factors[label]
    old = getattr(old_f, name)
    lo, hi = sorted((old, new))
    before = dict(factors)
    before[label] = _with(old_f, name, lo)
    after = dict(factors)
    after[label] = _with(old_f, name, hi)
    p0 = seev_scores(SeevParams(before, weights)).probabilities[label]
    p1 = seev_scores(SeevParams(after, weights)).probabilities[label]
    if name == "effort":
        assert p1 <= p0
    else:
        assert p1 >= p0


def _with(f, name, value):
    kw = {k: getattr(f, k) for k in ("salience", "effort", "expectancy", "value")}
    kw[name] = value
    return AoiFactors(**kw)


@settings(max_examples=100, deadline=None)
@given(st.dictionaries(st.integers(1, 6), factors_st, min_size=1, max_size=6), weights_st, st.integers(-20, 20))
def test_power_of_two_weight_scaling_is_exact(factors, weights, k):
    lam = 2.0 ** k
    scaled = SeevWeights(weights.s * lam, weights.ef * lam, weights.ex * lam, weights.v * lam)
    assert seev_scores(SeevParams(factors, scaled)) == seev_scores(SeevParams(factors, weights))


@settings(max_examples=100, deadline=None)
@given(st.dictionaries(st.integers(1, 6), factors_st, min_size=1, max_size=6), weights_st, st.floats(1e-3, 1e3))
def test_arbitrary_weight_scaling(factors, weights, lam):
    scaled = SeevWeights(weights.s * lam, weights.ef * lam, weights.ex * lam, weights.v * lam)
    a = seev_scores(SeevParams(factors, weights)).probabilities
    b = seev_scores(SeevParams(factors, scaled)).probabilities
    for k in a:
        assert b[k] == pytest.approx(a[k], abs=1e-12)


def test_total_variation_examples():
    assert total_variation([0.3, 0.7], [0.3, 0.7]) == 0
    assert total_variation([1, 0], [0, 1]) == 1
    assert total_variation([0.7, 0.3], [0.5, 0.5]) == pytest.approx(0.2, abs=1e-15)


def _simplex(rng, n):
    v = rng.random(n)
    return v / v.sum()


def test_total_variation_metric_properties():
    rng = np.random.default_rng(0)
    for _ in range(300):
        n = int(rng.integers(2, 7))
        p, q, r = _simplex(rng, n), _simplex(rng, n), _simplex(rng, n)
        assert total_variation(p, q) == total_variation(q, p)
        assert total_variation(p, r) <= total_variation(p, q) + total_variation(q, r) + 1e-15
        assert 0 <= total_variation(p, q) <= 1


def test_pearson():
    assert pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)
    assert pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)
    assert pearson([0.5, 0.5], [0.2, 0.8]) is None
    assert pearson([1, 2, 4, 3], [1, 3, 2, 5]) == pytest.approx(np.corrcoef([1, 2, 4, 3], [1, 3, 2, 5])[0, 1])


def test_compare_restricts_and_renormalises():
    pred = SeevPrediction({1: 0.7, 2: 0.3})
    observed = DwellReport({0: 5.0, 1: 2.5, 2: 2.5}, 10.0)
    cmp = compare(pred, observed)
    assert cmp.labels == (1, 2)
    assert cmp.observed == (0.5, 0.5)
    assert cmp.total_variation == pytest.approx(0.2)
    assert cmp.pearson_r is None


def test_compare_identical():
    cmp = compare(SeevPrediction({1: 0.25, 2: 0.75}), DwellReport({0: 0.0, 1: 1.0, 2: 3.0}, 4.0))
    assert cmp.total_variation == 0 and cmp.pearson_r == pytest.approx(1.0)


def test_compare_errors():
    with pytest.raises(ValueError):
        compare(SeevPrediction({5: 1.0}), DwellReport({0: 1.0, 1: 1.0}, 2.0))
    with pytest.raises(ValueError):
        compare(SeevPrediction({1: 1.0}), DwellReport({0: 1.0, 1: 0.0}, 1.0))


def test_param_file_round_trip(tmp_path):
    p = SeevParams({1: AoiFactors(0.1, 0.2, 0.3, 0.4), 7: AoiFactors(1, 0, 0.5, 1 / 3)}, SeevWeights(1, 0.5, 2, 3))
    path = tmp_path / "s.txt"
    write_seev_params(p, path)
    assert read_seev_params(path) == p


@pytest.mark.parametrize("text, fragment", [
    ("1 0.5 0.5 0.5\n", "line 1"),
    ("1 0.5 0.5 0.5 0.5\n1 0.5 0.5 0.5 0.5\n", "duplicate"),
    ("1 0.5 0.5 0.5 2\n", "line 1"),
    ("weights 1 1 1 1\n", "at least one"),
])
def test_param_file_errors(tmp_path, text, fragment):
    path = tmp_path / "s.txt"
    path.write_text(text)
    with pytest.raises(GazeFormatError, match=fragment):
        read_seev_params(path)


def test_report_csv(tmp_path):
    cmp = compare(SeevPrediction({1: 0.7, 2: 0.3}), DwellReport({0: 0.0, 1: 1.0, 2: 1.0}, 2.0))
    path = tmp_path / "r.csv"
    write_seev_report(cmp, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "aoi_label,predicted_p,observed_p"
    rows = [tuple(float(v) for v in line.split(",")) for line in lines[1:]]
    assert rows == [(1, 0.7, 0.5), (2, 0.3, 0.5)]
