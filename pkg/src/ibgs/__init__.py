"""Instance-level background subtraction.

Detections from any detector stream in frame by frame; tracked instances
that stay put become the background model, and new frames are reduced to
binary foreground masks by comparing each confident detection against the
modeled static instances.
"""

from .aod import AbandonedObjectDetector, AodEvent, AodParams
from .bgmodel import BackgroundEntry, BackgroundModel
from .config import Config, ConfigError, TrackerParams
from .evaluator import EvalCounts, Metrics, accumulate, aggregate, metrics
from .geometry import Box, RleMask, box_mask, iof, iou, mean_box, union_masks
from .pipeline import Pipeline, RunReport, run_stream
from .selector import FrameResult, select
from .stream import (
    Detection,
    FrameDetections,
    StreamHeader,
    StreamFormatError,
    parse_stream,
    serialize_stream,
    split_by_confidence,
)
from .synth import Scenario, build_scenario, generate, scenario_names
from .tracker import Tracker, median_filter, min_trajectory_iou, trajectory_min_iou

__version__ = "0.1.0"

__all__ = [
    "AbandonedObjectDetector",
    "AodEvent",
    "AodParams",
    "BackgroundEntry",
    "BackgroundModel",
    "Box",
    "Config",
    "ConfigError",
    "Detection",
    "EvalCounts",
    "FrameDetections",
    "FrameResult",
    "Metrics",
    "Pipeline",
    "RleMask",
    "RunReport",
    "Scenario",
    "StreamFormatError",
    "StreamHeader",
    "Tracker",
    "TrackerParams",
    "accumulate",
    "aggregate",
    "box_mask",
    "build_scenario",
    "generate",
    "iof",
    "iou",
    "mean_box",
    "median_filter",
    "metrics",
    "min_trajectory_iou",
    "parse_stream",
    "run_stream",
    "scenario_names",
    "select",
    "serialize_stream",
    "split_by_confidence",
    "trajectory_min_iou",
    "union_masks",
]
