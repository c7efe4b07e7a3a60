import pytest

from ibgs.bgmodel import BackgroundModel, entry_record
from ibgs.config import Config
from ibgs.geometry import Box
from ibgs.stream import Detection, FrameDetections
from ibgs.tracker import Tracker


def frame(k, *specs):
    return FrameDetections(
        k, tuple(Detection(box=Box(*b), score=s, label=lbl) for b, s, lbl in specs)
    )


def drive(tracker, model, cfg, frames):
    """Step frames through tracker + model, returning labels present after each update."""
    updates = {}
    for f in frames:
        tracker.step(f)
        if model.maybe_update(tracker, f.frame_index, cfg):
            updates[f.frame_index] = sorted(e.label for e in model.snapshot())
    return updates


def static_frames(n, box=(10, 10, 50, 50), label="chair"):
    return [frame(k, (box, 0.9, label)) for k in range(n)]


class TestMaybeUpdate:
    def test_static_track_admitted_with_mean_box(self):
        cfg = Config(update_period=10)
        tracker, model = Tracker(), BackgroundModel()
        updates = drive(tracker, model, cfg, static_frames(11))
        assert updates == {10: ["chair"]}
        entry = model.snapshot()[0]
        assert entry.mean_box == Box(10, 10, 50, 50)
        assert entry.last_confirmed == 10

    def test_moving_track_not_admitted(self):
        cfg = Config(update_period=10)
        tracker, model = Tracker(), BackgroundModel()
        frames = [frame(k, ((6 * k, 0, 6 * k + 20, 20), 0.9, "car")) for k in range(11)]
        updates = drive(tracker, model, cfg, frames)
        assert updates == {10: []}

    def test_no_update_before_period(self):
        cfg = Config(update_period=100)
        tracker, model = Tracker(), BackgroundModel()
        updates = drive(tracker, model, cfg, static_frames(99))
        assert updates == {}
        assert model.snapshot() == []

    def test_idempotent_within_period(self):
        cfg = Config(update_period=10)
        tracker, model = Tracker(), BackgroundModel()
        drive(tracker, model, cfg, static_frames(11))
        before = model.snapshot()
        assert model.maybe_update(tracker, 15, cfg) is False
        assert model.snapshot() == before

    def test_rewound_frame_rejected(self):
        cfg = Config(update_period=10)
        tracker, model = Tracker(), BackgroundModel()
        drive(tracker, model, cfg, static_frames(11))
        with pytest.raises(ValueError, match="precedes"):
            model.maybe_update(tracker, 5, cfg)

    def test_departed_track_removed(self):
        cfg = Config(update_period=10)
        tracker, model = Tracker(), BackgroundModel()
        moving = [
            frame(k, ((10 + 8 * max(0, k - 10), 10, 50 + 8 * max(0, k - 10), 50), 0.9, "car"))
            for k in range(21)
        ]
        updates = drive(tracker, model, cfg, moving)
        assert updates == {10: ["car"], 20: []}

    def test_retired_track_entry_persists(self):
        cfg = Config(update_period=10)
        tracker, model = Tracker(), BackgroundModel()
        drive(tracker, model, cfg, static_frames(11))
        # the chair's detections stop; track retires long before the next tick
        for k in range(11, 60):
            tracker.step(FrameDetections(k, ()))
        assert tracker.tracks == {}
        model.maybe_update(tracker, 60, cfg)
        assert [e.label for e in model.snapshot()] == ["chair"]

    def test_live_dichotomy_after_update(self):
        from ibgs.tracker import trajectory_min_iou

        cfg = Config(update_period=10)
        tracker, model = Tracker(), BackgroundModel()
        frames = [
            frame(
                k,
                ((10, 10, 50, 50), 0.9, "chair"),
                ((7 * k, 100, 7 * k + 30, 130), 0.9, "car"),
            )
            for k in range(11)
        ]
        drive(tracker, model, cfg, frames)
        present = {e.track_id for e in model.snapshot()}
        for track in tracker.live_tracks():
            static = trajectory_min_iou(track, cfg.filter_window) >= cfg.tau_move
            assert (track.id in present) == static

    def test_raising_tau_move_only_shrinks_admissions(self):
        def admitted(tau):
            cfg = Config(update_period=10, tau_move=tau)
            tracker, model = Tracker(), BackgroundModel()
            frames = [
                frame(
                    k,
                    ((10, 10, 50, 50), 0.9, "a"),
                    ((0.8 * k, 100, 0.8 * k + 40, 140), 0.9, "b"),
                    ((6 * k, 200, 6 * k + 20, 220), 0.9, "c"),
                )
                for k in range(11)
            ]
            drive(tracker, model, cfg, frames)
            return {e.label for e in model.snapshot()}

        sets = [admitted(t) for t in (0.1, 0.5, 0.9)]
        assert sets[2] <= sets[1] <= sets[0]

    def test_trajectory_span_limits_memory(self):
        # moved-then-parked object: full history keeps it out, a recent-window
        # config lets it in once the window is all-static
        frames = [
            frame(k, ((min(k, 20) * 8.0, 10, min(k, 20) * 8.0 + 30, 40), 0.9, "bag"))
            for k in range(41)
        ]
        full_cfg = Config(update_period=40)
        tracker, model = Tracker(), BackgroundModel()
        assert drive(tracker, model, full_cfg, frames) == {40: []}
        windowed = Config(update_period=40, trajectory_span=10)
        tracker, model = Tracker(), BackgroundModel()
        assert drive(tracker, model, windowed, frames) == {40: ["bag"]}


class TestSnapshot:
    def test_empty(self):
        assert BackgroundModel().snapshot() == []

    def test_ascending_track_id_order(self):
        cfg = Config(update_period=5)
        tracker, model = Tracker(), BackgroundModel()
        frames = [
            frame(k, ((10, 10, 30, 30), 0.9, "a"), ((100, 100, 130, 130), 0.9, "b"))
            for k in range(6)
        ]
        drive(tracker, model, cfg, frames)
        ids = [e.track_id for e in model.snapshot()]
        assert ids == sorted(ids) and len(ids) == 2

    def test_record_shape(self):
        cfg = Config(update_period=5)
        tracker, model = Tracker(), BackgroundModel()
        drive(tracker, model, cfg, static_frames(6))
        rec = entry_record(model.snapshot()[0])
        assert rec == {
            "track_id": 1,
            "bbox": [10.0, 10.0, 50.0, 50.0],
            "label": "chair",
            "last_confirmed": 5,
        }


def test_replay_determinism():
    def run():
        cfg = Config(update_period=10)
        tracker, model = Tracker(), BackgroundModel()
        frames = [
            frame(k, ((10, 10, 50, 50), 0.9, "a"), ((5 * k, 100, 5 * k + 25, 125), 0.9, "b"))
            for k in range(25)
        ]
        drive(tracker, model, cfg, frames)
        return [entry_record(e) for e in model.snapshot()]

    assert run() == run()
