"""Command-line entry points: run, eval, synth, sweep, aod.

Exit codes: 0 success, 2 usage (argparse), 3 stream parse/validation,
4 I/O failure, 5 config validation.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import Config, ConfigError, MATCH_MODES
from .evaluator import (
    EvalCounts,
    EvalError,
    _index_files,
    accumulate,
    aggregate,
    format_report_table,
    metrics,
    score_directories,
    write_report as write_eval_report,
)
from .images import read_gray
from .pipeline import iter_frame_results, run_stream, write_report
from .stream import StreamFormatError, parse_stream
from .synth import build_scenario, generate, scenario_names, write_scenario_output

EXIT_OK = 0
EXIT_PARSE = 3
EXIT_IO = 4
EXIT_CONFIG = 5


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file (a run report also works)")
    p.add_argument("--conf", type=float, help="confidence threshold tau_conf")
    p.add_argument("--delta-conf", type=float, help="confidence slack for modeling")
    p.add_argument("--move", type=float, help="static/moving threshold tau_move")
    p.add_argument("--fore", type=float, help="foreground threshold tau_fore")
    p.add_argument("--period", type=int, help="model update period in frames")
    p.add_argument("--filter-window", type=int, help="odd median-filter width")
    p.add_argument("--match-mode", choices=MATCH_MODES)
    p.add_argument("--no-iof", action="store_true", help="decide on IoU only")
    p.add_argument("--match-iou", type=float, help="tracker association minimum IoU")
    p.add_argument("--max-age", type=int, help="frames a track survives unmatched")


def _build_config(args: argparse.Namespace) -> Config:
    base: dict = {}
    if getattr(args, "config", None):
        base = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if "config" in base and isinstance(base["config"], dict):
            base = base["config"]
    overrides = {
        "tau_conf": args.conf,
        "delta_conf": args.delta_conf,
        "tau_move": args.move,
        "tau_fore": args.fore,
        "update_period": args.period,
        "filter_window": args.filter_window,
        "match_mode": args.match_mode,
    }
    for key, value in overrides.items():
        if value is not None:
            base[key] = value
    if getattr(args, "no_iof", False):
        base["use_iof"] = False
    tracker = dict(base.get("tracker", {}))
    if getattr(args, "match_iou", None) is not None:
        tracker["match_iou_min"] = args.match_iou
    if getattr(args, "max_age", None) is not None:
        tracker["max_age"] = args.max_age
    if tracker:
        base["tracker"] = tracker
    return Config.from_dict(base)


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    report = run_stream(
        Path(args.stream),
        cfg,
        masks_dir=args.masks_out,
        instances_path=args.instances_out,
        events_path=args.events_out,
        model_log_path=args.model_log,
        enable_aod=args.events_out is not None,
    )
    if args.report:
        write_report(report, args.report)
    print(
        f"{report.frames} frames, {report.fg_instances} foreground instances, "
        f"{report.events} events ({report.total_seconds:.2f}s)"
    )
    return EXIT_OK


def _cmd_aod(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    events_path = args.events_out or "events.jsonl"
    report = run_stream(
        Path(args.stream),
        cfg,
        masks_dir=args.masks_out,
        events_path=events_path,
        enable_aod=True,
    )
    text = Path(events_path).read_text(encoding="utf-8")
    sys.stdout.write(text)
    print(f"{report.events} events over {report.frames} frames -> {events_path}")
    return EXIT_OK


def _cmd_eval(args: argparse.Namespace) -> int:
    if args.grouping:
        grouping = json.loads(Path(args.grouping).read_text(encoding="utf-8"))
        per_video: dict[str, EvalCounts] = {}
        for video in sorted(grouping):
            per_video[video] = score_directories(
                Path(args.masks) / video, Path(args.gt) / video, args.eval_start
            )
        report = aggregate(per_video, grouping)
    else:
        counts = score_directories(args.masks, args.gt, args.eval_start)
        report = aggregate({"video": counts}, {"video": "all"})
    if args.report:
        write_eval_report(report, args.report)
    sys.stdout.write(format_report_table(report))
    return EXIT_OK


def _cmd_synth(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    result = generate(build_scenario(args.scenario, cfg, seed=args.seed))
    paths = write_scenario_output(result, args.out)
    print(f"wrote {paths['stream']}, {paths['gt']}/, {paths['manifest']}")
    return EXIT_OK


def _parse_grid(value: Optional[str], default: float) -> list[float]:
    if value is None:
        return [default]
    return [float(v) for v in value.split(",") if v]


def sweep_grid(
    stream_bytes: bytes,
    base: Config,
    conf_values: Sequence[float],
    move_values: Sequence[float],
    fore_values: Sequence[float],
    gt_dir: Optional[Path] = None,
    eval_start: Optional[int] = None,
) -> list[dict]:
    """One row of pixel/instance counts (and metrics when gt given) per grid point."""
    gt_arrays: dict[int, object] = {}
    if gt_dir is not None:
        gt_arrays = {k: read_gray(p) for k, p in _index_files(gt_dir).items()}
    _, frames = parse_stream(stream_bytes)
    scores = [det.score for frame in frames for det in frame.detections]
    rows = []
    for tau_conf, tau_move, tau_fore in itertools.product(
        conf_values, move_values, fore_values
    ):
        cfg = Config.from_dict(
            {
                **base.to_dict(),
                "tau_conf": tau_conf,
                "tau_move": tau_move,
                "tau_fore": tau_fore,
            }
        )
        fg_pixels = 0
        fg_instances = 0
        counts = EvalCounts()
        for out in iter_frame_results(stream_bytes, cfg):
            k = out.result.frame_index
            fg_pixels += out.result.mask.foreground_pixels()
            fg_instances += len(out.result.foreground)
            if k in gt_arrays and (eval_start is None or k >= eval_start):
                counts = accumulate(gt_arrays[k], out.result.mask.decode(), counts)
        row = {
            "tau_conf": tau_conf,
            "tau_move": tau_move,
            "tau_fore": tau_fore,
            "fg_pixels": fg_pixels,
            "fg_instances": fg_instances,
            "confident_detections": sum(1 for s in scores if s >= tau_conf),
        }
        if gt_arrays:
            row.update(metrics(counts).to_dict())
        rows.append(row)
    return rows


def _cmd_sweep(args: argparse.Namespace) -> int:
    base = _build_config(args)
    rows = sweep_grid(
        Path(args.stream).read_bytes(),
        base,
        _parse_grid(args.conf_grid, base.tau_conf),
        _parse_grid(args.move_grid, base.tau_move),
        _parse_grid(args.fore_grid, base.tau_fore),
        gt_dir=Path(args.gt) if args.gt else None,
        eval_start=args.eval_start,
    )
    if args.out:
        Path(args.out).write_text(json.dumps(rows, indent=2) + "\n", encoding="utf-8")
    for row in rows:
        print(json.dumps(row))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ibgs", description="instance-level background subtraction pipeline"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the pipeline over a detection stream")
    p_run.add_argument("stream")
    p_run.add_argument("--masks-out", help="directory for frame%%06d.pgm masks")
    p_run.add_argument("--instances-out", help="per-instance JSONL output")
    p_run.add_argument("--events-out", help="abandoned-object event JSONL output")
    p_run.add_argument("--model-log", help="background-model snapshot JSONL")
    p_run.add_argument("--report", help="run report JSON path")
    _add_config_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_eval = sub.add_parser("eval", help="score masks against ground truth")
    p_eval.add_argument("masks")
    p_eval.add_argument("gt")
    p_eval.add_argument("--grouping", help="JSON {video: category} for aggregation")
    p_eval.add_argument("--eval-start", type=int, help="first scored frame index")
    p_eval.add_argument("--report", help="report JSON path (a .txt table lands beside)")
    p_eval.set_defaults(func=_cmd_eval)

    p_synth = sub.add_parser("synth", help="generate a synthetic scenario")
    p_synth.add_argument("scenario", choices=scenario_names())
    p_synth.add_argument("--out", required=True)
    p_synth.add_argument("--seed", type=int, default=0)
    _add_config_flags(p_synth)
    p_synth.set_defaults(func=_cmd_synth)

    p_sweep = sub.add_parser("sweep", help="grid over thresholds")
    p_sweep.add_argument("stream")
    p_sweep.add_argument("--conf-grid", help="comma-separated tau_conf values")
    p_sweep.add_argument("--move-grid", help="comma-separated tau_move values")
    p_sweep.add_argument("--fore-grid", help="comma-separated tau_fore values")
    p_sweep.add_argument("--gt", help="ground-truth directory for Pr/Re/F rows")
    p_sweep.add_argument("--eval-start", type=int)
    p_sweep.add_argument("--out", help="JSON output path")
    _add_config_flags(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_aod = sub.add_parser("aod", help="run the pipeline for abandoned-object events")
    p_aod.add_argument("stream")
    p_aod.add_argument("--events-out")
    p_aod.add_argument("--masks-out")
    _add_config_flags(p_aod)
    p_aod.set_defaults(func=_cmd_aod)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StreamFormatError as exc:
        print(f"stream error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EvalError as exc:
        print(f"eval error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
