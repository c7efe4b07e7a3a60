from dataclasses import replace

import numpy as np

from ibgs.bgmodel import BackgroundEntry
from ibgs.config import Config
from ibgs.geometry import Box, RleMask, rasterize_box
from ibgs.selector import instance_records, select
from ibgs.stream import Detection


def det(box, score=0.9, label="thing", mask=None):
    return Detection(box=Box(*box), score=score, label=label, mask=mask)


def entry(track_id, box, label="bg"):
    return BackgroundEntry(track_id=track_id, mean_box=Box(*box), label=label, last_confirmed=0)


CFG = Config()


class TestSelect:
    def test_empty_model_everything_foreground(self):
        result = select(0, [(1, det((0, 0, 10, 10)))], [], CFG, 24, 32)
        assert len(result.foreground) == 1
        assert result.foreground[0].max_iou == 0.0
        assert result.foreground[0].max_iof == 0.0

    def test_static_instance_is_background(self):
        result = select(
            0, [(1, det((0, 0, 10, 10)))], [entry(1, (0, 0, 10, 10))], CFG, 24, 32
        )
        assert result.foreground == ()
        assert result.mask.foreground_pixels() == 0

    def test_half_occluded_static_object_vetoed_by_iof(self):
        # iou 0.5 alone would pass the 0.8 foreground test; iof 1.0 vetoes
        result = select(
            0, [(2, det((0, 0, 10, 10)))], [entry(1, (0, 0, 10, 20))], CFG, 24, 32
        )
        assert result.foreground == ()

    def test_iof_disabled_flips_the_occlusion_case(self):
        cfg = replace(CFG, use_iof=False)
        result = select(
            0, [(2, det((0, 0, 10, 10)))], [entry(1, (0, 0, 10, 20))], cfg, 24, 32
        )
        assert len(result.foreground) == 1

    def test_moved_instance_is_foreground(self):
        result = select(
            0, [(1, det((100, 100, 110, 110)))], [entry(1, (0, 0, 10, 10))], CFG, 24, 128
        )
        assert len(result.foreground) == 1

    def test_lowering_tau_fore_never_creates_foreground(self):
        rng = np.random.default_rng(9)
        entries = [entry(i, (x, y, x + 20, y + 20)) for i, (x, y) in enumerate(rng.uniform(0, 80, (5, 2)))]
        dets = [(None, det((x, y, x + 15, y + 15))) for x, y in rng.uniform(0, 80, (10, 2))]
        previous = None
        for tau in (0.9, 0.7, 0.5, 0.3, 0.1):
            cfg = replace(CFG, tau_fore=tau)
            fg = {id(i.detection) for i in select(0, dets, entries, cfg, 100, 100).foreground}
            if previous is not None:
                assert fg <= previous
            previous = fg

    def test_adding_entry_never_creates_foreground(self):
        rng = np.random.default_rng(4)
        dets = [(None, det((x, y, x + 15, y + 15))) for x, y in rng.uniform(0, 80, (10, 2))]
        entries = [entry(i, (x, y, x + 25, y + 25)) for i, (x, y) in enumerate(rng.uniform(0, 80, (6, 2)))]
        fg_small = {id(i.detection) for i in select(0, dets, entries[:3], CFG, 100, 100).foreground}
        fg_big = {id(i.detection) for i in select(0, dets, entries, CFG, 100, 100).foreground}
        assert fg_big <= fg_small

    def test_mask_union_matches_instance_supports(self):
        d1 = det((0, 0, 3, 3))
        d2 = det((2, 2, 5, 5))
        result = select(0, [(None, d1), (None, d2)], [], CFG, 8, 8)
        expected = rasterize_box(d1.box, 8, 8) | rasterize_box(d2.box, 8, 8)
        assert np.array_equal(result.mask.decode(), expected)

    def test_detection_mask_used_when_present(self):
        grid = np.zeros((8, 8), bool)
        grid[0, 0] = True
        d = det((0, 0, 4, 4), mask=RleMask.from_array(grid))
        result = select(0, [(None, d)], [], CFG, 8, 8)
        assert np.array_equal(result.mask.decode(), grid)

    def test_by_id_mode_only_consults_own_entry(self):
        cfg = replace(CFG, match_mode="by-id")
        entries = [entry(1, (0, 0, 10, 10))]
        # same geometry, fresh track id: max-over-model says BG, by-id says FG
        re_detected = [(2, det((0, 0, 10, 10)))]
        assert len(select(0, re_detected, entries, cfg, 24, 32).foreground) == 1
        assert select(0, re_detected, entries, CFG, 24, 32).foreground == ()
        same_id = [(1, det((0, 0, 10, 10)))]
        assert select(0, same_id, entries, cfg, 24, 32).foreground == ()


class TestInstanceRecords:
    def test_empty(self):
        result = select(0, [], [], CFG, 8, 8)
        assert instance_records(result, 8, 8) == []
        assert result.mask == RleMask.all_background(8, 8)

    def test_two_instances_two_records(self):
        result = select(
            5, [(1, det((0, 0, 2, 2))), (2, det((4, 4, 6, 6), label="dog"))], [], CFG, 8, 8
        )
        recs = instance_records(result, 8, 8)
        assert [r["frame"] for r in recs] == [5, 5]
        assert {r["label"] for r in recs} == {"thing", "dog"}
        assert all(r["mask"] is not None for r in recs)

    def test_maskless_instance_records_filled_box(self):
        result = select(0, [(None, det((0, 0, 2, 1)))], [], CFG, 2, 3)
        rec = instance_records(result, 2, 3)[0]
        assert rec["mask"]["size"] == [2, 3]
        got = RleMask(2, 3, tuple(rec["mask"]["counts"]))
        assert got.decode().astype(int).tolist() == [[1, 1, 0], [0, 0, 0]]
