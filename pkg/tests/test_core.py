import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gazeseev.core import (Aoi, GazeFormatError, GazeRecording, GazeSample, Group, Scenario, Validity,
                           read_aoi_config, read_gaze_csv, write_aoi_config, write_gaze_csv)
from gazeseev.simgen import DEFAULT_AOIS, default_profile, generate_recording

HEADER = "participant_id,group,scenario,sample_rate_hz,t,x,y,validity\n"


def _write(tmp_path, body, name="g.csv"):
    p = tmp_path / name
    p.write_text(HEADER + body)
    return p


def test_read_three_rows(tmp_path):
    p = _write(tmp_path, "p1,control,info_retrieval,100,0.00,1,2,valid\n"
                         "p1,control,info_retrieval,100,0.01,3,4,valid\n"
                         "p1,control,info_retrieval,100,0.02,5,6,valid\n")
    rec = read_gaze_csv(p)
    assert len(rec) == 3
    assert [s.t for s in rec.samples] == [0.0, 0.01, 0.02]
    assert rec.group is Group.CONTROL and rec.scenario is Scenario.INFO_RETRIEVAL
    assert rec.sample_rate == 100.0


def test_duplicate_timestamp_names_line_3(tmp_path):
    p = _write(tmp_path, "p1,control,info_retrieval,100,0.00,1,2,valid\n"
                         "p1,control,info_retrieval,100,0.01,3,4,valid\n"
                         "p1,control,info_retrieval,100,0.01,5,6,valid\n")
    with pytest.raises(GazeFormatError, match="line 4"):
        read_gaze_csv(p)


def test_duplicate_timestamp_as_second_sample(tmp_path):
    # header is line 1, so the second data row is line 3
    p = _write(tmp_path, "p1,control,info_retrieval,100,0.01,1,2,valid\n"
                         "p1,control,info_retrieval,100,0.01,3,4,valid\n")
    with pytest.raises(GazeFormatError, match="line 3"):
        read_gaze_csv(p)


def test_blink_with_empty_coordinates(tmp_path):
    p = _write(tmp_path, "p1,adhd_high,collaborative,60,0.5,,,blink\n")
    s = read_gaze_csv(p).samples[0]
    assert s.validity is Validity.BLINK and s.x == 0.0 and s.y == 0.0


def test_validity_case_insensitive(tmp_path):
    p = _write(tmp_path, "p1,control,info_retrieval,100,0,1,2,VALID\np1,control,info_retrieval,100,1,,,Missing\n")
    assert [s.validity for s in read_gaze_csv(p).samples] == [Validity.VALID, Validity.MISSING]


@pytest.mark.parametrize("body, fragment", [
    ("p1,control,info_retrieval,100,0,1,2,closed\n", "line 2"),
    ("p1,control,info_retrieval,100,0,abc,2,valid\n", "line 2"),
    ("p1,control,info_retrieval,100,0,1,2\n", "line 2"),
    ("p1,nobody,info_retrieval,100,0,1,2,valid\n", "line 2"),
    ("p1,control,info_retrieval,100,0,1,2,valid\np1,control,info_retrieval,100,-1,1,2,valid\n", "line 3"),
])
def test_malformed_rows(tmp_path, body, fragment):
    with pytest.raises(GazeFormatError, match=fragment):
        read_gaze_csv(_write(tmp_path, body))


def test_empty_file(tmp_path):
    p = tmp_path / "e.csv"
    p.write_text("")
    with pytest.raises(GazeFormatError, match="empty"):
        read_gaze_csv(p)
    p.write_text(HEADER)
    with pytest.raises(GazeFormatError, match="no samples"):
        read_gaze_csv(p)


def test_wrong_header(tmp_path):
    p = tmp_path / "h.csv"
    p.write_text("t,x,y\n0,1,2\n")
    with pytest.raises(GazeFormatError, match="header"):
        read_gaze_csv(p)


def test_recording_rejects_empty_and_unordered():
    with pytest.raises(ValueError):
        GazeRecording("p", Group.CONTROL, Scenario.COLLABORATIVE, 100.0, ())
    with pytest.raises(ValueError):
        GazeRecording("p", Group.CONTROL, Scenario.COLLABORATIVE, 100.0,
                      (GazeSample(0.1, 0, 0), GazeSample(0.1, 0, 0)))


sample_st = st.tuples(
    st.floats(min_value=1e-6, max_value=10.0),
    st.floats(-1e4, 1e4, allow_nan=False),
    st.floats(-1e4, 1e4, allow_nan=False),
    st.sampled_from(list(Validity)),
)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(sample_st, min_size=1, max_size=40),
    st.sampled_from(list(Group)),
    st.sampled_from(list(Scenario)),
    st.floats(1.0, 2000.0),
    st.text(alphabet="abcXYZ_-0123", min_size=1, max_size=8),
)
def test_csv_round_trip(tmp_path_factory, rows, group, scenario, rate, pid):
    t = 0.0
    samples = []
    for dt, x, y, v in rows:
        t += dt
        if v is not Validity.VALID:
            x = y = 0.0
        samples.append(GazeSample(t, x, y, v))
    rec = GazeRecording(pid, group, scenario, rate, tuple(samples))
    path = tmp_path_factory.mktemp("rt") / "r.csv"
    write_gaze_csv(rec, path)
    assert read_gaze_csv(path) == rec


def test_simulated_recording_line_count(tmp_path):
    rec = generate_recording(default_profile(Scenario.INFO_RETRIEVAL, Group.CONTROL).with_overrides(duration=10.0),
                             DEFAULT_AOIS, seed=1)
    assert len(rec) == 1000
    path = tmp_path / "sim.csv"
    write_gaze_csv(rec, path)
    assert len(path.read_text().splitlines()) == 1001
    assert read_gaze_csv(path) == rec


def test_write_empty_recording_rejected(tmp_path):
    class Empty:
        samples = ()
    with pytest.raises(ValueError):
        write_gaze_csv(Empty(), tmp_path / "x.csv")


def test_aoi_config_two_areas(tmp_path):
    p = tmp_path / "aoi.txt"
    p.write_text("# two task areas\n1 100 100 300 200\n\n2 400 100 600 200  # right\n")
    aois = read_aoi_config(p)
    assert aois == [Aoi(1, 100, 100, 300, 200), Aoi(2, 400, 100, 600, 200)]


@pytest.mark.parametrize("text, fragment", [
    ("1 100 100 300 200\n1 400 100 600 200\n", "duplicate"),
    ("1 100 100 100 200\n", "degenerate"),
    ("1 100 200 300 200\n", "degenerate"),
    ("0 100 100 300 200\n", "reserved"),
    ("1 100 100 300\n", "line 1"),
])
def test_aoi_config_errors(tmp_path, text, fragment):
    p = tmp_path / "aoi.txt"
    p.write_text(text)
    with pytest.raises(GazeFormatError, match=fragment):
        read_aoi_config(p)


def test_aoi_config_round_trip(tmp_path):
    p = tmp_path / "aoi.txt"
    write_aoi_config(DEFAULT_AOIS, p)
    assert tuple(read_aoi_config(p)) == DEFAULT_AOIS


def test_aoi_contains_half_open():
    a = Aoi(1, 0, 0, 10, 10)
    assert a.contains(0, 0) and not a.contains(10, 5) and not a.contains(5, 10)
    assert math.isclose(a.area, 100)
