"""Frame loop wiring the stages together: confidence split, tracking,
periodic background-model update, foreground selection, optional
abandoned-object rules, and artifact writing.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

import numpy as np

from .aod import AbandonedObjectDetector, AodEvent, AodParams, event_record
from .bgmodel import BackgroundModel, entry_record
from .config import Config
from .images import write_pgm
from .selector import FrameResult, instance_records, select
from .stream import FrameDetections, StreamHeader, parse_stream, split_by_confidence
from .tracker import Tracker


@dataclass
class FrameOutput:
    result: FrameResult
    events: list[AodEvent]
    model_updated: bool


class Pipeline:
    """Sequential pipeline state; one instance per stream."""

    def __init__(
        self,
        header: StreamHeader,
        cfg: Optional[Config] = None,
        aod_params: Optional[AodParams] = None,
        enable_aod: bool = True,
    ):
        self.header = header
        self.cfg = cfg or Config()
        self.cfg.validate()
        self.tracker = Tracker(self.cfg.tracker)
        self.model = BackgroundModel()
        self.aod = (
            AbandonedObjectDetector(aod_params, self.cfg) if enable_aod else None
        )

    def process(self, frame: FrameDetections) -> FrameOutput:
        _, bg_set = split_by_confidence(frame, self.cfg)
        step = self.tracker.step(
            FrameDetections(frame.frame_index, tuple(bg_set))
        )
        track_of = {det_idx: track_id for track_id, det_idx in step.assignments}
        updated = self.model.maybe_update(self.tracker, frame.frame_index, self.cfg)

        # the confident subset is the fg half of the split, kept aligned with
        # bg_set indices so each detection carries its track id
        confident = [
            (track_of.get(det_idx), det)
            for det_idx, det in enumerate(bg_set)
            if det.score >= self.cfg.tau_conf
        ]

        result = select(
            frame.frame_index,
            confident,
            self.model.snapshot(),
            self.cfg,
            self.header.height,
            self.header.width,
        )
        events = (
            self.aod.observe(frame.frame_index, self.tracker, self.model)
            if self.aod is not None
            else []
        )
        return FrameOutput(result=result, events=events, model_updated=updated)


@dataclass
class RunReport:
    config: dict
    frames: int = 0
    fg_instances: int = 0
    fg_pixels: int = 0
    events: int = 0
    artifacts: dict = field(default_factory=dict)
    total_seconds: float = 0.0
    mean_ms_per_frame: float = 0.0
    max_ms_per_frame: float = 0.0

    def deterministic_dict(self) -> dict:
        return {
            "config": self.config,
            "frames": self.frames,
            "fg_instances": self.fg_instances,
            "fg_pixels": self.fg_pixels,
            "events": self.events,
            "artifacts": self.artifacts,
        }

    def timing_dict(self) -> dict:
        return {
            "frames": self.frames,
            "total_seconds": self.total_seconds,
            "mean_ms_per_frame": self.mean_ms_per_frame,
            "max_ms_per_frame": self.max_ms_per_frame,
        }


def run_stream(
    source: Union[bytes, Path, str],
    cfg: Optional[Config] = None,
    masks_dir: Optional[Union[str, Path]] = None,
    instances_path: Optional[Union[str, Path]] = None,
    events_path: Optional[Union[str, Path]] = None,
    model_log_path: Optional[Union[str, Path]] = None,
    aod_params: Optional[AodParams] = None,
    enable_aod: bool = True,
) -> RunReport:
    """Run the pipeline over a stream file or bytes, writing requested artifacts.

    Masks go out one 8-bit frame image each (background 0, foreground 255,
    frame%06d.pgm). Instance records, events, and model snapshots are
    line-delimited JSON. Wall-clock timing never enters the deterministic
    report payload.
    """
    if isinstance(source, (str, Path)):
        data = Path(source).read_bytes()
    else:
        data = source
    header, frames = parse_stream(data)
    cfg = cfg or Config()
    pipe = Pipeline(header, cfg, aod_params=aod_params, enable_aod=enable_aod)

    if masks_dir is not None:
        masks_dir = Path(masks_dir)
        masks_dir.mkdir(parents=True, exist_ok=True)
    inst_fp = open(instances_path, "w", encoding="utf-8") if instances_path else None
    events_fp = open(events_path, "w", encoding="utf-8") if events_path else None
    model_fp = open(model_log_path, "w", encoding="utf-8") if model_log_path else None

    report = RunReport(config=cfg.to_dict())
    frame_times: list[float] = []
    started = time.perf_counter()
    try:
        for frame in frames:
            t0 = time.perf_counter()
            out = pipe.process(frame)
            report.frames += 1
            report.fg_instances += len(out.result.foreground)
            report.fg_pixels += out.result.mask.foreground_pixels()
            report.events += len(out.events)
            if masks_dir is not None:
                arr = out.result.mask.decode().astype(np.uint8) * 255
                write_pgm(masks_dir / f"frame{frame.frame_index:06d}.pgm", arr)
            if inst_fp is not None:
                for rec in instance_records(
                    out.result, header.height, header.width
                ):
                    inst_fp.write(json.dumps(rec) + "\n")
            if events_fp is not None:
                for event in out.events:
                    events_fp.write(json.dumps(event_record(event)) + "\n")
            if model_fp is not None and out.model_updated:
                snap = [entry_record(e) for e in pipe.model.snapshot()]
                model_fp.write(
                    json.dumps({"frame": frame.frame_index, "entries": snap}) + "\n"
                )
            frame_times.append(time.perf_counter() - t0)
    finally:
        for fp in (inst_fp, events_fp, model_fp):
            if fp is not None:
                fp.close()

    report.total_seconds = time.perf_counter() - started
    if frame_times:
        report.mean_ms_per_frame = 1e3 * float(np.mean(frame_times))
        report.max_ms_per_frame = 1e3 * float(np.max(frame_times))
    report.artifacts = {
        "masks": str(masks_dir) if masks_dir is not None else None,
        "instances": str(instances_path) if instances_path else None,
        "events": str(events_path) if events_path else None,
        "model_log": str(model_log_path) if model_log_path else None,
    }
    return report


def write_report(report: RunReport, report_path: Union[str, Path]) -> None:
    """report.json holds only reproducible fields; timing goes to a sibling file."""
    path = Path(report_path)
    path.write_text(
        json.dumps(report.deterministic_dict(), indent=2) + "\n", encoding="utf-8"
    )
    timing = path.with_name(path.stem + "_timing.json")
    timing.write_text(json.dumps(report.timing_dict(), indent=2) + "\n", encoding="utf-8")


def iter_frame_results(
    source: Union[bytes, Path, str],
    cfg: Optional[Config] = None,
    enable_aod: bool = False,
) -> Iterable[FrameOutput]:
    """In-memory pipeline pass, for sweeps and tests."""
    if isinstance(source, (str, Path)):
        data = Path(source).read_bytes()
    else:
        data = source
    header, frames = parse_stream(data)
    pipe = Pipeline(header, cfg or Config(), enable_aod=enable_aod)
    for frame in frames:
        yield pipe.process(frame)
