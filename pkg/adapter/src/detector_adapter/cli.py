"""detector-adapter export: produce a detection stream from a recorded
stream (replay), a video file, or a numbered image directory.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .backends import BACKENDS
from .config import AdapterConfig, AdapterError
from .export import export_stream


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="detector-adapter")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("export", help="write a detection stream file")
    p.add_argument("input", help="recorded stream, video file, or image directory")
    p.add_argument("--out", required=True, help="output stream path")
    p.add_argument("--model", default="replay", choices=sorted(BACKENDS))
    p.add_argument("--score-floor", type=float, default=0.0)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--vocab", help="comma-separated fixed label list (default: open)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = AdapterConfig(
        model=args.model,
        input_path=args.input,
        output_path=args.out,
        score_floor=args.score_floor,
        stride=args.stride,
        vocabulary=args.vocab.split(",") if args.vocab else None,
    )
    try:
        summary = export_stream(cfg)
    except AdapterError as exc:
        print(f"adapter error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    print(
        f"{summary['frames']} frames, {summary['detections']} detections "
        f"({summary['detections_dropped']} dropped, "
        f"{summary['skipped_frames']} frames skipped) -> {summary['output']}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
