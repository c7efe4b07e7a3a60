"""Foreground instance selection against the background model.

A confident detection is foreground only when both its best IoU and best IoF
against the modeled static instances fall below the foreground threshold;
high IoF alone vetoes it, which is what keeps a half-occluded static object
out of the foreground.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional, Sequence

from .bgmodel import BackgroundEntry
from .config import Config
from .geometry import RleMask, box_mask, iof, iou, union_masks
from .stream import Detection, _mask_record


@dataclass(frozen=True)
class ForegroundInstance:
    track_id: Optional[int]
    detection: Detection
    max_iou: float
    max_iof: float


@dataclass(frozen=True)
class FrameResult:
    frame_index: int
    foreground: tuple[ForegroundInstance, ...]
    mask: RleMask


def _overlap_scores(
    det: Detection,
    track_id: Optional[int],
    snapshot: Sequence[BackgroundEntry],
    by_id: dict[int, BackgroundEntry],
    cfg: Config,
) -> tuple[float, float]:
    if cfg.match_mode == "by-id":
        entry = by_id.get(track_id) if track_id is not None else None
        entries = [entry] if entry is not None else []
    else:
        entries = list(snapshot)
    if not entries:
        return 0.0, 0.0
    max_iou = max(iou(det.box, e.mean_box) for e in entries)
    max_iof = max(iof(det.box, e.mean_box) for e in entries)
    return max_iou, max_iof


def instance_mask(det: Detection, height: int, width: int) -> RleMask:
    # detectors without masks fall back to the filled box
    if det.mask is not None:
        return det.mask
    return box_mask(det.box, height, width)


def select(
    frame_index: int,
    detections: Sequence[tuple[Optional[int], Detection]],
    snapshot: Sequence[BackgroundEntry],
    cfg: Config,
    height: int,
    width: int,
) -> FrameResult:
    """Classify confident detections FG/BG and render the frame's binary mask."""
    by_id = {e.track_id: e for e in snapshot}
    fg: list[ForegroundInstance] = []
    for track_id, det in detections:
        max_iou, max_iof = _overlap_scores(det, track_id, snapshot, by_id, cfg)
        is_fg = max_iou < cfg.tau_fore
        if cfg.use_iof:
            is_fg = is_fg and max_iof < cfg.tau_fore
        if is_fg:
            fg.append(ForegroundInstance(track_id, det, max_iou, max_iof))
    mask = union_masks(
        (instance_mask(inst.detection, height, width) for inst in fg), height, width
    )
    return FrameResult(frame_index=frame_index, foreground=tuple(fg), mask=mask)


def instance_records(result: FrameResult, height: int, width: int) -> list[dict[str, Any]]:
    """One record per foreground instance, stream-convention serialization."""
    records = []
    for inst in result.foreground:
        det = inst.detection
        records.append(
            {
                "frame": result.frame_index,
                "track_id": inst.track_id,
                "label": det.label,
                "score": det.score,
                "bbox": det.box.to_list(),
                "max_iou": inst.max_iou,
                "max_iof": inst.max_iof,
                "mask": _mask_record(instance_mask(det, height, width)),
            }
        )
    return records
