"""Detection sources behind one interface.

A backend opens an input and yields (frame_index, detections, warning)
tuples, where each detection is a wire-format dict: {"bbox": [x1,y1,x2,y2],
"score": s, "label": L, "mask": {"size": [H,W], "counts": [...]} | None}.

Backends:
  replay  -- re-emit a recorded stream file; runs anywhere, no model weights.
  motion  -- background-subtraction pseudo-detector over a video file or a
             numbered image directory (requires opencv).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator, Optional

import numpy as np

from .config import AdapterConfig, AdapterError

FrameTuple = tuple[int, list[dict], Optional[str]]

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".pgm", ".ppm", ".tif", ".tiff"}


@dataclass
class Source:
    width: int
    height: int
    fps: Optional[float]
    describe: str
    frames: Iterator[FrameTuple]


def rle_counts(mask: np.ndarray) -> list[int]:
    """Row-major alternating run lengths, background run first."""
    flat = np.asarray(mask, dtype=bool).ravel()
    if flat.size == 0:
        return [0]
    changes = np.flatnonzero(np.diff(flat.view(np.int8))) + 1
    bounds = np.concatenate(([0], changes, [flat.size]))
    runs = np.diff(bounds).tolist()
    if flat[0]:
        runs = [0] + runs
    return [int(r) for r in runs]


def open_replay(cfg: AdapterConfig) -> Source:
    """Re-emit a previously recorded stream file."""
    path = Path(cfg.input_path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise AdapterError(f"{path}: empty stream")
    header = json.loads(lines[0])
    if header.get("type") != "header":
        raise AdapterError(f"{path}: first record is not a header")

    def frames() -> Iterator[FrameTuple]:
        for raw in lines[1:]:
            if not raw.strip():
                continue
            record = json.loads(raw)
            if record.get("type") != "frame":
                continue
            yield int(record["frame"]), list(record.get("detections", [])), None

    return Source(
        width=int(header["width"]),
        height=int(header["height"]),
        fps=header.get("fps"),
        describe=f"replay:{path.name}",
        frames=frames(),
    )


def _image_files(directory: Path) -> list[Path]:
    return sorted(
        p for p in directory.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES
    )


def open_motion(cfg: AdapterConfig) -> Source:
    """Motion pseudo-detector: background subtraction + connected components.

    Weight-free stand-in for a real instance detector so the exporter can be
    driven by actual video; every blob is labeled "object".
    """
    try:
        import cv2
    except ImportError as exc:
        raise AdapterError("the motion backend requires opencv-python") from exc

    path = Path(cfg.input_path)
    if path.is_dir():
        files = _image_files(path)
        if not files:
            raise AdapterError(f"{path}: no frame images found")
        probe = cv2.imread(str(files[0]))
        if probe is None:
            raise AdapterError(f"{files[0]}: unreadable first frame")
        height, width = probe.shape[:2]

        def read_frames() -> Iterator[tuple[int, Optional[np.ndarray]]]:
            for k, f in enumerate(files):
                yield k, cv2.imread(str(f))

        fps = None
        describe = f"motion:{path.name}/"
    else:
        cap = cv2.VideoCapture(str(path))
        if not cap.isOpened():
            raise AdapterError(f"{path}: cannot open video")
        width = int(cap.get(cv2.CAP_PROP_FRAME_WIDTH))
        height = int(cap.get(cv2.CAP_PROP_FRAME_HEIGHT))
        fps = float(cap.get(cv2.CAP_PROP_FPS)) or None

        def read_frames() -> Iterator[tuple[int, Optional[np.ndarray]]]:
            k = 0
            while True:
                ok, img = cap.read()
                if not ok:
                    break
                yield k, img
                k += 1
            cap.release()

        describe = f"motion:{path.name}"

    subtractor = cv2.createBackgroundSubtractorMOG2(detectShadows=True)

    def frames() -> Iterator[FrameTuple]:
        for k, img in read_frames():
            if img is None:
                yield k, [], f"frame {k} unreadable"
                continue
            fg = subtractor.apply(img)
            binary = (fg == 255).astype(np.uint8)  # drop MOG2 shadow level
            n, labels, stats, _ = cv2.connectedComponentsWithStats(binary)
            detections = []
            for i in range(1, n):
                x, y, w, h, area = stats[i]
                if area < 30:
                    continue
                component = labels == i
                detections.append(
                    {
                        "bbox": [float(x), float(y), float(x + w), float(y + h)],
                        "score": min(1.0, 0.5 + area / (2.0 * width * height / 100.0)),
                        "label": "object",
                        "mask": {
                            "size": [height, width],
                            "counts": rle_counts(component),
                        },
                    }
                )
            yield k, detections, None

    return Source(width=width, height=height, fps=fps, describe=describe, frames=frames())


BACKENDS: dict[str, Callable[[AdapterConfig], Source]] = {
    "replay": open_replay,
    "motion": open_motion,
}


def open_source(cfg: AdapterConfig) -> Source:
    if cfg.model not in BACKENDS:
        raise AdapterError(
            f"unknown model {cfg.model!r}; available: {sorted(BACKENDS)}"
        )
    return BACKENDS[cfg.model](cfg)
