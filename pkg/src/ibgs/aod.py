"""Abandoned-object rules on top of the tracker and background model.

Two ways an object is flagged, once per track:
  * isolated_static  — appeared after the initial background model existed,
    has been static for the dwell period, and had no carrier overlap during it;
  * carrier_split    — moved in sync with a carrier (person, vehicle) for long
    enough, then the carrier departed while the object stayed static.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

from .bgmodel import BackgroundModel
from .config import Config
from .geometry import Box, iof, iou
from .tracker import Track, Tracker, min_trajectory_iou

DEFAULT_CARRIER_LABELS = frozenset({"person", "car", "truck", "bus"})


@dataclass(frozen=True)
class AodParams:
    carrier_labels: frozenset[str] = DEFAULT_CARRIER_LABELS
    dwell_frames: int = 50
    sync_iof_min: float = 0.2
    sync_frames: int = 10
    depart_dist_min: float = 1.5  # multiples of the object's box diagonal

    def validate(self) -> None:
        if self.dwell_frames < 1 or self.sync_frames < 1:
            raise ValueError("dwell_frames and sync_frames must be >= 1")
        if not 0.0 <= self.sync_iof_min <= 1.0:
            raise ValueError("sync_iof_min must be in [0, 1]")


@dataclass(frozen=True)
class AodEvent:
    frame_index: int
    track_id: int
    label: str
    box: Box
    rule: str  # isolated_static | carrier_split


def event_record(event: AodEvent) -> dict[str, Any]:
    return {
        "frame": event.frame_index,
        "track_id": event.track_id,
        "label": event.label,
        "bbox": event.box.to_list(),
        "rule": event.rule,
    }


@dataclass
class _Streak:
    start: int
    last: int
    qualified: bool = False


@dataclass
class _ObjectState:
    last_overlap: Optional[int] = None
    streaks: dict[int, _Streak] = field(default_factory=dict)


class AbandonedObjectDetector:
    """Stateful per-frame observer; feed it every frame after the tracker step."""

    def __init__(self, params: Optional[AodParams] = None, cfg: Optional[Config] = None):
        self.params = params or AodParams()
        self.params.validate()
        self.cfg = cfg or Config()
        self._state: dict[int, _ObjectState] = {}
        self._fired: set[int] = set()
        self.events: list[AodEvent] = []

    def _is_static_for(self, track: Track, frame_index: int) -> bool:
        horizon = frame_index - self.params.dwell_frames
        if track.first_frame > horizon:
            return False
        recent = [b for f, b in track.history if f >= horizon]
        if not recent:
            return False
        return min_trajectory_iou(recent, self.cfg.filter_window) >= self.cfg.tau_move

    def observe(
        self, frame_index: int, tracker: Tracker, model: BackgroundModel
    ) -> list[AodEvent]:
        live = tracker.live_tracks()
        detected = [t for t in live if t.time_since_update == 0]
        carriers = [t for t in detected if t.label in self.params.carrier_labels]
        objects = [t for t in detected if t.label not in self.params.carrier_labels]
        live_ids = {t.id for t in live}

        for obj in objects:
            state = self._state.setdefault(obj.id, _ObjectState())
            for carrier in carriers:
                if iof(obj.current_box, carrier.current_box) < self.params.sync_iof_min:
                    continue
                state.last_overlap = frame_index
                streak = state.streaks.get(carrier.id)
                if streak is not None and streak.last == frame_index - 1:
                    streak.last = frame_index
                else:
                    streak = _Streak(start=frame_index, last=frame_index)
                    state.streaks[carrier.id] = streak
                if streak.last - streak.start + 1 >= self.params.sync_frames:
                    streak.qualified = True

        new_events = []
        carrier_by_id = {t.id: t for t in carriers}
        for obj in objects:
            if obj.id in self._fired:
                continue
            state = self._state.setdefault(obj.id, _ObjectState())
            rule = None
            if self._is_static_for(obj, frame_index):
                rule = self._split_rule(obj, state, frame_index, live_ids, carrier_by_id)
                if rule is None and self._isolated_rule(obj, state, frame_index, model):
                    rule = "isolated_static"
            if rule is not None:
                event = AodEvent(
                    frame_index=frame_index,
                    track_id=obj.id,
                    label=obj.label,
                    box=obj.current_box,
                    rule=rule,
                )
                self._fired.add(obj.id)
                self.events.append(event)
                new_events.append(event)
        return new_events

    def _split_rule(
        self,
        obj: Track,
        state: _ObjectState,
        frame_index: int,
        live_ids: set[int],
        carrier_by_id: dict[int, Track],
    ) -> Optional[str]:
        threshold = self.params.depart_dist_min * obj.current_box.diagonal()
        for carrier_id, streak in state.streaks.items():
            if not streak.qualified or streak.last >= frame_index:
                continue  # sync must be over
            if carrier_id not in live_ids:
                return "carrier_split"  # carrier left the scene entirely
            carrier = carrier_by_id.get(carrier_id)
            if carrier is None:
                continue  # live but not detected this frame; re-check later
            ox, oy = obj.current_box.center()
            cx, cy = carrier.current_box.center()
            if ((cx - ox) ** 2 + (cy - oy) ** 2) ** 0.5 >= threshold:
                return "carrier_split"
        return None

    def _isolated_rule(
        self, obj: Track, state: _ObjectState, frame_index: int, model: BackgroundModel
    ) -> bool:
        if model.first_update_frame is None:
            return False
        if obj.first_frame <= model.first_update_frame:
            return False  # pre-existing objects are scenery, not abandonment
        horizon = frame_index - self.params.dwell_frames
        if state.last_overlap is not None and state.last_overlap > horizon:
            return False
        # a track reborn over someone else's background entry (e.g. after an
        # occlusion broke the original track) is known scenery, not a new object
        for entry in model.snapshot():
            if entry.track_id == obj.id:
                continue
            if (
                iou(obj.current_box, entry.mean_box) >= self.cfg.tau_fore
                or iof(obj.current_box, entry.mean_box) >= self.cfg.tau_fore
            ):
                return False
        return True
