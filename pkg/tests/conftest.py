import pytest

from gazeseev.core import GazeRecording, GazeSample, Group, Scenario, Validity

ACCEPTANCE_LINES: list[str] = []


def make_recording(xs, ys=None, dt=0.01, validity=None, t0=0.0):
    """Build a recording from coordinate lists; ``validity`` holds 'v', 'm' or 'b' per sample."""
    ys = [0.0] * len(xs) if ys is None else ys
    codes = {"v": Validity.VALID, "m": Validity.MISSING, "b": Validity.BLINK}
    vals = [Validity.VALID] * len(xs) if validity is None else [codes[c] for c in validity]
    samples = []
    for i, (x, y, v) in enumerate(zip(xs, ys, vals)):
        if v is not Validity.VALID:
            x = y = 0.0
        samples.append(GazeSample(round(t0 + i * dt, 10), float(x), float(y), v))
    return GazeRecording("test", Group.CONTROL, Scenario.INFO_RETRIEVAL, 1.0 / dt, tuple(samples))


@pytest.fixture
def recording_factory():
    return make_recording


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
