"""Gaze analytics: preprocessing, event detection, AOI dwell, RBF-SVM focus classification,
SEEV attention prediction and group statistics, with a seeded gaze simulator."""

from .core import (Aoi, GazeFormatError, GazeRecording, GazeSample, Group, LabeledPoint, Scenario, Validity,
                   read_aoi_config, read_gaze_csv, write_aoi_config, write_gaze_csv)

__version__ = "0.1.0"

__all__ = [
    "Aoi", "GazeFormatError", "GazeRecording", "GazeSample", "Group", "LabeledPoint", "Scenario", "Validity",
    "read_aoi_config", "read_gaze_csv", "write_aoi_config", "write_gaze_csv",
]
