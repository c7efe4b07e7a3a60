"""Turn any backend's detections into a pipeline-ready stream file.

The adapter never makes foreground/background decisions; it filters by
score floor and vocabulary, re-indexes frames consecutively, and writes
the line-delimited wire format:

    {"type":"header","width":W,"height":H,"fps":F|null,"source":S}
    {"type":"frame","frame":K,"detections":[...]}
"""

from __future__ import annotations

import json
from pathlib import Path

from .backends import open_source
from .config import AdapterConfig, AdapterError


def _valid_detection(det: dict, width: int, height: int) -> dict:
    bbox = det.get("bbox")
    if not isinstance(bbox, (list, tuple)) or len(bbox) != 4:
        raise AdapterError(f"detection bbox malformed: {bbox!r}")
    x1, y1, x2, y2 = (float(v) for v in bbox)
    if x2 < x1 or y2 < y1:
        raise AdapterError(f"detection bbox inverted: {bbox!r}")
    score = float(det.get("score", 0.0))
    score = min(max(score, 0.0), 1.0)
    mask = det.get("mask")
    if mask is not None:
        if list(mask.get("size", ())) != [height, width]:
            raise AdapterError(f"mask size {mask.get('size')} != [{height}, {width}]")
        counts = [int(c) for c in mask["counts"]]
        if sum(counts) != height * width or any(c < 0 for c in counts):
            raise AdapterError("mask counts malformed")
        mask = {"size": [height, width], "counts": counts}
    return {
        "bbox": [x1, y1, x2, y2],
        "score": score,
        "label": str(det.get("label", "object")),
        "mask": mask,
    }


def export_stream(cfg: AdapterConfig) -> dict:
    """Write the stream file; returns a small summary of what was emitted."""
    cfg.validate()
    source = open_source(cfg)
    vocabulary = set(cfg.vocabulary) if cfg.vocabulary is not None else None

    records: list[str] = []
    warnings: list[str] = []
    emitted = 0
    detections_kept = 0
    detections_seen = 0
    for position, (source_index, detections, warning) in enumerate(source.frames):
        if warning:
            warnings.append(warning)
            continue
        if position % cfg.stride != 0:
            continue
        kept = []
        for det in detections:
            detections_seen += 1
            clean = _valid_detection(det, source.width, source.height)
            if clean["score"] < cfg.score_floor:
                continue
            if vocabulary is not None and clean["label"] not in vocabulary:
                continue
            kept.append(clean)
        records.append(
            json.dumps({"type": "frame", "frame": emitted, "detections": kept})
        )
        detections_kept += len(kept)
        emitted += 1

    source_note = f"{source.describe} stride={cfg.stride} floor={cfg.score_floor}"
    if warnings:
        source_note += f" skipped={len(warnings)}"
    header = {
        "type": "header",
        "width": source.width,
        "height": source.height,
        "fps": source.fps,
        "source": source_note,
    }

    out = Path(cfg.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as fp:
        fp.write(json.dumps(header) + "\n")
        for line in records:
            fp.write(line + "\n")

    return {
        "frames": emitted,
        "detections": detections_kept,
        "detections_dropped": detections_seen - detections_kept,
        "skipped_frames": len(warnings),
        "output": str(out),
    }
