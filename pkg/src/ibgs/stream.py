"""Detection-stream protocol: line-delimited JSON records decoupling the
pipeline from whatever detector produced the instances.

First line is a header record; every following line is one frame:

    {"type":"header","width":W,"height":H,"fps":F|null,"source":S}
    {"type":"frame","frame":K,"detections":[{"bbox":[x1,y1,x2,y2],
        "score":s,"label":L,"mask":{"size":[H,W],"counts":[...]}|null},...]}
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass
from typing import IO, Any, Iterator, Optional, Sequence, Union

from .config import Config
from .geometry import Box, RleMask


class StreamFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class StreamHeader:
    width: int
    height: int
    fps: Optional[float] = None
    source: str = ""

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("stream dimensions must be >= 1")


@dataclass(frozen=True)
class Detection:
    box: Box
    score: float
    label: str
    mask: Optional[RleMask] = None

    def __post_init__(self):
        object.__setattr__(self, "score", float(self.score))
        if not 0.0 <= self.score <= 1.0:
            raise ValueError("score out of range")


@dataclass(frozen=True)
class FrameDetections:
    frame_index: int
    detections: tuple[Detection, ...]


def header_record(header: StreamHeader) -> dict[str, Any]:
    return {
        "type": "header",
        "width": header.width,
        "height": header.height,
        "fps": header.fps,
        "source": header.source,
    }


def _mask_record(mask: Optional[RleMask]) -> Optional[dict[str, Any]]:
    if mask is None:
        return None
    return {"size": [mask.height, mask.width], "counts": list(mask.counts)}


def detection_record(det: Detection) -> dict[str, Any]:
    return {
        "bbox": det.box.to_list(),
        "score": det.score,
        "label": det.label,
        "mask": _mask_record(det.mask),
    }


def frame_record(frame: FrameDetections) -> dict[str, Any]:
    return {
        "type": "frame",
        "frame": frame.frame_index,
        "detections": [detection_record(d) for d in frame.detections],
    }


def write_stream(
    fp: IO[bytes], header: StreamHeader, frames: Sequence[FrameDetections]
) -> None:
    fp.write((json.dumps(header_record(header)) + "\n").encode("utf-8"))
    for frame in frames:
        fp.write((json.dumps(frame_record(frame)) + "\n").encode("utf-8"))


def serialize_stream(header: StreamHeader, frames: Sequence[FrameDetections]) -> bytes:
    buf = io.BytesIO()
    write_stream(buf, header, frames)
    return buf.getvalue()


def _parse_mask(obj: Any, header: StreamHeader, line: int) -> Optional[RleMask]:
    if obj is None:
        return None
    if not isinstance(obj, dict) or "size" not in obj or "counts" not in obj:
        raise StreamFormatError("mask must have 'size' and 'counts'", line)
    size = obj["size"]
    if (
        not isinstance(size, list)
        or len(size) != 2
        or [size[0], size[1]] != [header.height, header.width]
    ):
        raise StreamFormatError(
            f"mask size {size} does not match stream "
            f"{[header.height, header.width]}", line,
        )
    try:
        return RleMask(int(size[0]), int(size[1]), tuple(int(c) for c in obj["counts"]))
    except (TypeError, ValueError) as exc:
        raise StreamFormatError(f"bad mask: {exc}", line) from exc


def _parse_detection(obj: Any, header: StreamHeader, line: int) -> Detection:
    if not isinstance(obj, dict):
        raise StreamFormatError("detection must be an object", line)
    try:
        box = Box.from_seq(obj["bbox"])
    except (KeyError, TypeError, ValueError) as exc:
        raise StreamFormatError(f"bad bbox: {exc}", line) from exc
    score = obj.get("score")
    if not isinstance(score, (int, float)) or not 0.0 <= float(score) <= 1.0:
        raise StreamFormatError("score out of range", line)
    label = obj.get("label")
    if not isinstance(label, str):
        raise StreamFormatError("label must be a string", line)
    mask = _parse_mask(obj.get("mask"), header, line)
    return Detection(box=box, score=float(score), label=label, mask=mask)


def _record(raw: bytes, line: int) -> dict[str, Any]:
    try:
        obj = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise StreamFormatError(f"malformed record: {exc}", line) from exc
    if not isinstance(obj, dict) or "type" not in obj:
        raise StreamFormatError("record must be an object with a 'type'", line)
    return obj


def parse_stream(
    source: Union[bytes, IO[bytes]]
) -> tuple[StreamHeader, Iterator[FrameDetections]]:
    """Parse a detection stream, yielding frames lazily and validating as it goes."""
    fp = io.BytesIO(source) if isinstance(source, bytes) else source
    first = fp.readline()
    if not first.strip():
        raise StreamFormatError("missing header", 1)
    obj = _record(first, 1)
    if obj["type"] != "header":
        raise StreamFormatError("first record must be the header", 1)
    try:
        header = StreamHeader(
            width=int(obj["width"]),
            height=int(obj["height"]),
            fps=None if obj.get("fps") is None else float(obj["fps"]),
            source=str(obj.get("source", "")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise StreamFormatError(f"bad header: {exc}", 1) from exc

    def frames() -> Iterator[FrameDetections]:
        last_index = -1
        line = 1
        for raw in fp:
            line += 1
            if not raw.strip():
                continue
            obj = _record(raw, line)
            if obj["type"] != "frame":
                raise StreamFormatError(f"unexpected record type {obj['type']!r}", line)
            idx = obj.get("frame")
            if not isinstance(idx, int) or idx < 0:
                raise StreamFormatError("frame index must be a non-negative int", line)
            if idx <= last_index:
                raise StreamFormatError(
                    f"frame index {idx} not greater than previous {last_index}", line
                )
            dets = obj.get("detections")
            if not isinstance(dets, list):
                raise StreamFormatError("detections must be a list", line)
            parsed = tuple(_parse_detection(d, header, line) for d in dets)
            last_index = idx
            yield FrameDetections(frame_index=idx, detections=parsed)

    return header, frames()


def split_by_confidence(
    frame: FrameDetections, cfg: Config
) -> tuple[list[Detection], list[Detection]]:
    """Two views of the frame: fg_set at tau_conf, bg_set at tau_conf - delta_conf.

    fg_set feeds foreground selection; the laxer bg_set feeds tracking and the
    background model so that more stationary instances get modeled. fg_set is
    always a subset of bg_set.
    """
    lower = cfg.tau_conf - cfg.delta_conf
    fg = [d for d in frame.detections if d.score >= cfg.tau_conf]
    bg = [d for d in frame.detections if d.score >= lower]
    return fg, bg
