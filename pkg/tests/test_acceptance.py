"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (visible with `pytest -s`). Run via:

    pytest tests/test_acceptance.py -v -s
"""

import itertools
import json
import shutil
import sys
import time
from contextlib import contextmanager
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from conftest import load_jsonl
from ibgs.cli import sweep_grid
from ibgs.config import Config
from ibgs.evaluator import EvalCounts, accumulate, metrics, score_directories
from ibgs.geometry import Box, RleMask, iof, iou
from ibgs.pipeline import Pipeline, run_stream, write_report
from ibgs.stream import parse_stream
from ibgs.synth import build_scenario, generate, scenario_names
from ibgs.tracker import solve_assignment


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE FAIL: {name}", file=sys.stderr)
        raise
    print(f"ACCEPTANCE PASS: {name}", file=sys.stderr)


def _full_pass(root: Path, seed: int = 0) -> dict[str, bytes]:
    """Generate + run every scenario with full artifacts; digest of all bytes."""
    if root.exists():
        shutil.rmtree(root)
    digests: dict[str, bytes] = {}
    for name in scenario_names():
        out = root / name
        out.mkdir(parents=True)
        result = generate(build_scenario(name, Config(), seed=seed))
        stream = out / "stream.jsonl"
        stream.write_bytes(result.stream_bytes())
        report = run_stream(
            stream,
            Config(),
            masks_dir=out / "masks",
            instances_path=out / "instances.jsonl",
            events_path=out / "events.jsonl",
            model_log_path=out / "model_log.jsonl",
        )
        write_report(report, out / "report.json")
        blob = b"".join(
            p.read_bytes() for p in sorted((out / "masks").glob("*.pgm"))
        )
        for piece in ("instances.jsonl", "events.jsonl", "model_log.jsonl", "report.json"):
            blob += (out / piece).read_bytes()
        digests[name] = blob
    return digests


@pytest.fixture(scope="module")
def timed_full_pass(tmp_path_factory):
    root = tmp_path_factory.mktemp("acceptance_pass")
    started = time.perf_counter()
    digests = _full_pass(root / "one")
    elapsed = time.perf_counter() - started
    return {"digests": digests, "elapsed": elapsed, "root": root}


def test_geometry_suite():
    with criterion("geometry identities, bounds, and RLE round-trip (<1s)"):
        started = time.perf_counter()
        assert iou(Box(0, 0, 10, 10), Box(0, 0, 10, 10)) == 1.0
        assert iof(Box(0, 0, 10, 10), Box(0, 0, 10, 10)) == 1.0
        assert iou(Box(0, 0, 10, 10), Box(0, 0, 10, 20)) == 0.5
        assert iof(Box(0, 0, 10, 10), Box(0, 0, 10, 20)) == 1.0
        assert iof(Box(0, 0, 10, 20), Box(0, 0, 10, 10)) == 0.5  # asymmetry witness
        rng = np.random.default_rng(0)
        for _ in range(500):
            x1, y1, x2o, y2o = rng.uniform(0, 50, size=4)
            a = Box(x1, y1, x1 + x2o, y1 + y2o)
            u1, v1, u2o, v2o = rng.uniform(0, 50, size=4)
            b = Box(u1, v1, u1 + u2o, v1 + v2o)
            assert iou(a, b) == iou(b, a)
            if a.area() > 0:
                assert 0.0 <= iou(a, b) <= iof(a, b) <= 1.0
        for k in range(1000):
            h, w = (int(v) for v in rng.integers(1, 65, size=2))
            grid = rng.random((h, w)) < rng.random()
            assert np.array_equal(RleMask.from_array(grid).decode(), grid)
        assert time.perf_counter() - started < 1.0


def test_tracker_assignment_oracle():
    with criterion("assignment cost equals brute-force minimum on 120 instances (<5s)"):
        started = time.perf_counter()
        rng = np.random.default_rng(1)
        checked = 0
        for _ in range(120):
            n_rows, n_cols = (int(v) for v in rng.integers(1, 6, size=2))
            cost = rng.random((n_rows, n_cols))
            pairs = solve_assignment(cost)
            total = sum(cost[r, c] for r, c in pairs)
            k = min(n_rows, n_cols)
            best = min(
                sum(cost[r, c] for r, c in zip(rows, cols))
                for rows in itertools.combinations(range(n_rows), k)
                for cols in itertools.permutations(range(n_cols), k)
            )
            assert abs(total - best) <= 1e-12
            checked += 1
        assert checked >= 100
        assert time.perf_counter() - started < 5.0


def test_background_model_lifecycle(scenario_run):
    with criterion("departure: entry present at tick 100, removed at tick 200"):
        run = scenario_run("departure")
        log = {rec["frame"]: rec["entries"] for rec in load_jsonl(run["model_log"])}
        assert sorted(log) == [100, 200]
        assert [e["label"] for e in log[100]] == ["car"]
        assert log[200] == []


def test_occlusion_iof_rule(scenario_run):
    with criterion("occlusion: no static-object foreground, person recall 1.0"):
        run = scenario_run("occlusion")
        start = run["manifest"]["eval_start"]
        bike_records = [
            rec
            for rec in load_jsonl(run["instances"])
            if rec["label"] == "bicycle" and rec["frame"] >= start
        ]
        assert bike_records == []
        counts = score_directories(run["masks"], run["gt"])
        m = metrics(counts)
        assert counts.fp == 0
        assert m.recall == 1.0


def test_evaluator_correctness(scenario_run):
    with criterion("evaluator: exact hand counts, perfect-prediction, shadow bounds"):
        gt = np.array([[255, 255, 0, 50, 85, 170]], dtype=np.uint8)
        pred = np.array([[1, 0, 1, 0, 1, 0]], dtype=bool)
        counts = accumulate(gt, pred, EvalCounts())
        assert counts == EvalCounts(tp=1, fp=1, fn=1, tn=1, nb_shadow=1, nb_shadow_error=0)
        m = metrics(EvalCounts(tp=8, fp=2, fn=2))
        assert (m.precision, m.recall) == (0.8, 0.8) and abs(m.f_measure - 0.8) < 1e-12
        assert metrics(EvalCounts(nb_shadow=1000, nb_shadow_error=2)).fpr_s == 0.002

        levels = np.array([0, 50, 85, 170, 255], dtype=np.uint8)
        rng = np.random.default_rng(2)
        for _ in range(50):
            gt = levels[rng.integers(0, 5, size=(20, 20))]
            perfect = metrics(accumulate(gt, gt == 255, EvalCounts()))
            if (gt == 255).any():
                assert perfect.f_measure == 1.0
            if (gt == 50).any():
                assert perfect.fpr_s == 0.0
            noisy = accumulate(gt, rng.random((20, 20)) < 0.5, EvalCounts())
            assert noisy.nb_shadow_error <= min(noisy.fp, noisy.nb_shadow)
        for name in scenario_names():
            counts = score_directories(
                scenario_run(name)["masks"], scenario_run(name)["gt"]
            )
            assert counts.nb_shadow_error <= min(counts.fp, counts.nb_shadow)


def test_shadow_false_positive_rate(scenario_run):
    with criterion("shadow strips yield FPR-S = 0"):
        run = scenario_run("shadow_bands")
        counts = score_directories(run["masks"], run["gt"])
        assert counts.nb_shadow > 0
        assert metrics(counts).fpr_s == 0.0


def _fp_pixels(name: str, cfg: Config) -> int:
    result = generate(build_scenario(name, Config()))
    header, frames = parse_stream(result.stream_bytes())
    pipe = Pipeline(header, cfg)
    counts = EvalCounts()
    for frame in frames:
        out = pipe.process(frame)
        counts = accumulate(
            result.gt[frame.frame_index], out.result.mask.decode(), counts
        )
    return counts.fp


def test_ablation_directions(scenario_run):
    with criterion("ablations: IoF off > FP, filter off > FP, slack off <= admissions"):
        base = Config()
        assert _fp_pixels("occlusion", replace(base, use_iof=False)) > _fp_pixels(
            "occlusion", base
        )
        assert _fp_pixels("dropout", replace(base, filter_window=1)) > _fp_pixels(
            "dropout", base
        )

        def admissions(delta: float) -> int:
            cfg = replace(base, delta_conf=delta)
            result = generate(build_scenario("low_score_static", Config()))
            header, frames = parse_stream(result.stream_bytes())
            pipe = Pipeline(header, cfg)
            admitted: set[int] = set()
            for frame in frames:
                if pipe.process(frame).model_updated:
                    admitted |= {e.track_id for e in pipe.model.snapshot()}
            return len(admitted)

        assert admissions(0.0) <= admissions(0.1)


def test_sweep_sanity(scenario_run):
    with criterion("sweep: fg pixels non-decreasing in tau_fore; tau_fore=1 selects all"):
        run = scenario_run("jitter")
        rows = sweep_grid(
            Path(run["stream"]).read_bytes(),
            Config(),
            [0.6],
            [0.5],
            [0.2, 0.5, 0.8, 1.0],
        )
        pixels = [r["fg_pixels"] for r in rows]
        assert pixels == sorted(pixels)
        assert rows[-1]["fg_instances"] == rows[-1]["confident_detections"]
        occl = scenario_run("occlusion")
        occl_rows = sweep_grid(
            Path(occl["stream"]).read_bytes(), Config(), [0.6], [0.5], [0.4, 0.8, 1.0]
        )
        occl_pixels = [r["fg_pixels"] for r in occl_rows]
        assert occl_pixels == sorted(occl_pixels)


def test_abandoned_object_scenarios(scenario_run):
    with criterion("aod: one isolated_static, one carrier_split, zero false alarms"):
        drop = scenario_run("drop_and_leave")
        events = load_jsonl(drop["events"])
        assert len(events) == 1
        event = events[0]
        assert event["rule"] == "isolated_static" and event["label"] == "bag"
        window = drop["manifest"]["expected_events"][0]
        assert window["frame_min"] <= event["frame"] <= window["frame_max"]
        bag_ids = {
            rec["track_id"]
            for rec in load_jsonl(drop["instances"])
            if rec["label"] == "bag"
        }
        assert event["track_id"] in bag_ids

        carried = scenario_run("carried_then_dropped")
        events = load_jsonl(carried["events"])
        assert len(events) == 1
        assert events[0]["rule"] == "carrier_split" and events[0]["label"] == "bag"

        assert load_jsonl(scenario_run("static_scene")["events"]) == []


def test_end_to_end_scenario_fidelity(scenario_run):
    with criterion("every scenario matches its manifest; drop_and_leave F >= 0.95"):
        for name in scenario_names():
            run = scenario_run(name)
            per_frame: dict[int, list[str]] = {}
            for rec in load_jsonl(run["instances"]):
                per_frame.setdefault(rec["frame"], []).append(rec["label"])
            for k, expected in enumerate(run["manifest"]["expected_fg"]):
                assert sorted(per_frame.get(k, [])) == expected, (name, k)
            for frame, labels in run["manifest"]["expected_model"].items():
                log = {r["frame"]: r["entries"] for r in load_jsonl(run["model_log"])}
                got = sorted({e["label"] for e in log[int(frame)]})
                assert got == labels, (name, frame)
        m = metrics(
            score_directories(
                scenario_run("drop_and_leave")["masks"],
                scenario_run("drop_and_leave")["gt"],
            )
        )
        assert m.f_measure is not None and m.f_measure >= 0.95


def test_determinism(timed_full_pass):
    with criterion("byte-identical masks, reports, and event logs across runs"):
        second = _full_pass(timed_full_pass["root"] / "one")
        assert second == timed_full_pass["digests"]


def test_runtime_budget(timed_full_pass):
    with criterion("full synthetic suite completes in under 60 s"):
        assert timed_full_pass["elapsed"] < 60.0, timed_full_pass["elapsed"]
