"""Instance-level background model: the set of static-instance mean boxes.

Every update period, each live track is classified static or moving from its
trajectory motion measure; static instances are inserted or refreshed, moving
ones are evicted. Entries of retired tracks persist until contradicted, so a
static object whose track died to detector dropout remains background.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional

from .config import Config
from .geometry import Box, mean_box
from .tracker import Tracker, min_trajectory_iou


@dataclass(frozen=True)
class BackgroundEntry:
    track_id: int
    mean_box: Box
    label: str
    last_confirmed: int


class BackgroundModel:
    def __init__(self):
        self.entries: dict[int, BackgroundEntry] = {}
        self.last_update_frame = 0
        self.first_update_frame: Optional[int] = None

    def maybe_update(self, tracker: Tracker, frame_index: int, cfg: Config) -> bool:
        """Apply the periodic static/moving update; returns True when it ran."""
        if frame_index < self.last_update_frame:
            raise ValueError(
                f"frame {frame_index} precedes last update {self.last_update_frame}"
            )
        if frame_index - self.last_update_frame < cfg.update_period:
            return False
        for track in tracker.live_tracks():
            if not track.history:
                continue
            boxes = track.boxes()
            if cfg.trajectory_span is not None:
                boxes = boxes[-cfg.trajectory_span:]
            if min_trajectory_iou(boxes, cfg.filter_window) >= cfg.tau_move:
                self.entries[track.id] = BackgroundEntry(
                    track_id=track.id,
                    mean_box=mean_box(boxes),
                    label=track.label,
                    last_confirmed=frame_index,
                )
            else:
                self.entries.pop(track.id, None)
        self.last_update_frame = frame_index
        if self.first_update_frame is None:
            self.first_update_frame = frame_index
        return True

    def snapshot(self) -> list[BackgroundEntry]:
        """Read-only view of the entries in ascending track-id order."""
        return [self.entries[k] for k in sorted(self.entries)]

    def reset(self) -> None:
        self.entries.clear()


def entry_record(entry: BackgroundEntry) -> dict[str, Any]:
    return {
        "track_id": entry.track_id,
        "bbox": entry.mean_box.to_list(),
        "label": entry.label,
        "last_confirmed": entry.last_confirmed,
    }
