"""Identity-stable multi-object tracking over per-frame detections.

Constant-velocity Kalman prediction on (cx, cy, area, aspect) with IoU-cost
bipartite matching, plus the trajectory motion measure used to classify a
track as static or moving.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .config import TrackerParams
from .geometry import Box, iou, mean_box
from .stream import Detection, FrameDetections

# pad value for squarifying rectangular cost matrices; must exceed any
# achievable 1 - iou cost so padding never displaces a real pairing
_PAD_COST = 10.0


def _box_to_z(box: Box) -> np.ndarray:
    w = max(box.width, 1e-6)
    h = max(box.height, 1e-6)
    return np.array([box.x1 + w / 2.0, box.y1 + h / 2.0, w * h, w / h])


def _z_to_box(x: np.ndarray) -> Box:
    s = max(float(x[2]), 1e-12)
    r = max(float(x[3]), 1e-12)
    w = np.sqrt(s * r)
    h = s / w
    cx, cy = float(x[0]), float(x[1])
    return Box(cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0)


class KalmanBoxFilter:
    """Linear Kalman filter over [cx, cy, s, r, vcx, vcy, vs]."""

    def __init__(self, box: Box):
        self.F = np.eye(7)
        self.F[0, 4] = self.F[1, 5] = self.F[2, 6] = 1.0
        self.H = np.zeros((4, 7))
        self.H[:4, :4] = np.eye(4)
        self.R = np.diag([1.0, 1.0, 10.0, 10.0])
        self.P = np.diag([10.0, 10.0, 10.0, 10.0, 1e4, 1e4, 1e4])
        self.Q = np.diag([1.0, 1.0, 1.0, 1.0, 0.01, 0.01, 1e-4])
        self.x = np.zeros(7)
        self.x[:4] = _box_to_z(box)

    def predict(self) -> Box:
        if self.x[6] + self.x[2] <= 0:
            self.x[6] = 0.0
        self.x = self.F @ self.x
        self.P = self.F @ self.P @ self.F.T + self.Q
        return _z_to_box(self.x)

    def update(self, box: Box) -> None:
        z = _box_to_z(box)
        y = z - self.H @ self.x
        S = self.H @ self.P @ self.H.T + self.R
        K = self.P @ self.H.T @ np.linalg.inv(S)
        self.x = self.x + K @ y
        self.P = (np.eye(7) - K @ self.H) @ self.P

    def state_box(self) -> Box:
        return _z_to_box(self.x)


class Track:
    def __init__(self, track_id: int, frame_index: int, det: Detection, history_cap: int):
        self.id = track_id
        self.kf = KalmanBoxFilter(det.box)
        self.history: deque[tuple[int, Box]] = deque(maxlen=history_cap)
        self.history.append((frame_index, det.box))
        self.label = det.label
        self.hits = 1
        self.age = 1
        self.time_since_update = 0
        self.first_frame = frame_index

    @property
    def last_frame(self) -> int:
        return self.history[-1][0]

    @property
    def current_box(self) -> Box:
        return self.history[-1][1]

    def boxes(self) -> list[Box]:
        return [b for _, b in self.history]

    def confirmed(self, min_hits: int) -> bool:
        return self.hits >= min_hits


def solve_assignment(cost: np.ndarray) -> list[tuple[int, int]]:
    """Minimum-total-cost row/column pairing.

    Among equal-cost optima the lexicographically smallest (row, col) pair
    list is returned, so matching is fully deterministic.
    """
    cost = np.asarray(cost, dtype=np.float64)
    if cost.size == 0:
        return []
    n_rows, n_cols = cost.shape
    n = max(n_rows, n_cols)
    sq = np.full((n, n), _PAD_COST)
    sq[:n_rows, :n_cols] = cost
    rr, cc = linear_sum_assignment(sq)
    best = float(sq[rr, cc].sum())
    eps = 1e-9 * n

    pairs: list[tuple[int, int]] = []
    free_cols = list(range(n))
    fixed = 0.0
    for r in range(n):
        real = [c for c in free_cols if c < n_cols]
        padding = [c for c in free_cols if c >= n_cols]
        candidates = real + padding[:1]
        rest_rows = list(range(r + 1, n))
        for c in candidates:
            rest_cols = [x for x in free_cols if x != c]
            rest = 0.0
            if rest_rows:
                sub = sq[np.ix_(rest_rows, rest_cols)]
                sr, sc = linear_sum_assignment(sub)
                rest = float(sub[sr, sc].sum())
            if fixed + sq[r, c] + rest <= best + eps:
                if r < n_rows and c < n_cols:
                    pairs.append((r, c))
                fixed += sq[r, c]
                free_cols.remove(c)
                break
    return pairs


def median_filter(values: Sequence[float], window: int) -> list[float]:
    """Sliding median with truncated edge windows.

    Even-length edge windows take the upper of the two middle values, which
    keeps one-sided dips from leaking into the boundary estimates.
    """
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be an odd integer >= 1")
    if window == 1:
        return list(values)
    half = window // 2
    n = len(values)
    out = []
    for k in range(n):
        w = sorted(values[max(0, k - half): min(n, k + half + 1)])
        out.append(w[len(w) // 2])
    return out


def min_trajectory_iou(boxes: Sequence[Box], window: int = 1) -> float:
    """Minimum median-filtered IoU of each box against the trajectory mean.

    1.0 means the instance never left its average position; low values mean
    it moved far from rest at some point.
    """
    if not boxes:
        raise ValueError("empty trajectory")
    center = mean_box(boxes)
    raw = [iou(b, center) for b in boxes]
    return min(median_filter(raw, window))


def trajectory_min_iou(track: Track, window: int = 1) -> float:
    return min_trajectory_iou(track.boxes(), window)


@dataclass(frozen=True)
class StepResult:
    # one (track_id, detection_index) per detection: matched or freshly spawned
    assignments: tuple[tuple[int, int], ...]
    removed: tuple[int, ...]


class Tracker:
    """Single-writer tracker state; step() must be called in frame order."""

    def __init__(self, params: Optional[TrackerParams] = None):
        self.params = params or TrackerParams()
        self.tracks: dict[int, Track] = {}
        self.retired_count = 0
        self._next_id = 1
        self._last_frame: Optional[int] = None

    def live_tracks(self, confirmed_only: bool = False) -> list[Track]:
        tracks = list(self.tracks.values())
        if confirmed_only:
            tracks = [t for t in tracks if t.confirmed(self.params.min_hits)]
        return tracks

    def step(self, frame: FrameDetections) -> StepResult:
        idx = frame.frame_index
        if self._last_frame is not None and idx <= self._last_frame:
            raise ValueError(
                f"frame {idx} not after last stepped frame {self._last_frame}"
            )
        elapsed = 1 if self._last_frame is None else idx - self._last_frame
        self._last_frame = idx

        ordered = list(self.tracks.values())  # insertion order == id order
        predicted: list[Box] = []
        for t in ordered:
            for _ in range(elapsed):
                pred = t.kf.predict()
            t.age += elapsed
            t.time_since_update += elapsed
            predicted.append(pred)

        dets = frame.detections
        matches: list[tuple[int, int]] = []
        if ordered and dets:
            cost = np.array(
                [[1.0 - iou(p, d.box) for d in dets] for p in predicted]
            )
            for r, c in solve_assignment(cost):
                if 1.0 - cost[r, c] >= self.params.match_iou_min:
                    matches.append((r, c))

        assignments: list[tuple[int, int]] = []
        matched_dets = set()
        for r, c in matches:
            track = ordered[r]
            det = dets[c]
            track.kf.update(det.box)
            track.history.append((idx, det.box))
            track.label = det.label
            track.hits += 1
            track.time_since_update = 0
            matched_dets.add(c)
            assignments.append((track.id, c))

        for c, det in enumerate(dets):
            if c in matched_dets:
                continue
            track = Track(self._next_id, idx, det, self.params.history_cap)
            self.tracks[track.id] = track
            self._next_id += 1
            assignments.append((track.id, c))

        removed = []
        for t in ordered:
            if t.time_since_update > self.params.max_age:
                del self.tracks[t.id]
                self.retired_count += 1
                removed.append(t.id)

        assignments.sort(key=lambda pair: pair[1])
        return StepResult(assignments=tuple(assignments), removed=tuple(removed))


def dump_tracks(tracker: Tracker, with_history: bool = False) -> list[dict]:
    """Line-record-friendly view of the live tracks, for debugging."""
    records = []
    for t in tracker.live_tracks():
        rec = {
            "track_id": t.id,
            "label": t.label,
            "first_frame": t.first_frame,
            "last_frame": t.last_frame,
            "hits": t.hits,
            "age": t.age,
            "time_since_update": t.time_since_update,
            "bbox": t.current_box.to_list(),
        }
        if with_history:
            rec["history"] = [[f, b.to_list()] for f, b in t.history]
        records.append(rec)
    return records
