"""Axis-aligned box and binary-mask primitives.

Boxes use continuous (x1, y1, x2, y2) pixel coordinates with (x1, y1) the
upper-left corner. Masks are stored as uncompressed row-major RLE with
alternating runs that always start with a background run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class Box:
    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self):
        for name in ("x1", "y1", "x2", "y2"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.x2 < self.x1 or self.y2 < self.y1:
            raise ValueError(f"negative box extent: {self}")

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    def area(self) -> float:
        return self.width * self.height

    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x1 + self.x2), 0.5 * (self.y1 + self.y2))

    def diagonal(self) -> float:
        return float(np.hypot(self.width, self.height))

    def translate(self, dx: float, dy: float) -> "Box":
        return Box(self.x1 + dx, self.y1 + dy, self.x2 + dx, self.y2 + dy)

    def clip(self, width: float, height: float) -> "Box":
        return Box(
            min(max(self.x1, 0.0), width),
            min(max(self.y1, 0.0), height),
            min(max(self.x2, 0.0), width),
            min(max(self.y2, 0.0), height),
        )

    def to_list(self) -> list[float]:
        return [self.x1, self.y1, self.x2, self.y2]

    @classmethod
    def from_seq(cls, seq: Sequence[float]) -> "Box":
        x1, y1, x2, y2 = (float(v) for v in seq)
        return cls(x1, y1, x2, y2)


def intersection_area(a: Box, b: Box) -> float:
    w = min(a.x2, b.x2) - max(a.x1, b.x1)
    h = min(a.y2, b.y2) - max(a.y1, b.y1)
    if w <= 0.0 or h <= 0.0:
        return 0.0
    return w * h


def iou(a: Box, b: Box) -> float:
    """Intersection over union; 0 when the union has zero area."""
    inter = intersection_area(a, b)
    # the union can never round below either area; clamping keeps
    # iou <= iof exact in floating point
    union = max(a.area() + b.area() - inter, a.area(), b.area())
    if union <= 0.0:
        return 0.0
    return inter / union


def iof(rec: Box, bg: Box) -> float:
    """Intersection over the recent box's own area; 0 for a zero-area box.

    Robust to occlusion: a partially visible detection that sits inside a
    remembered full-extent box keeps a high score even when iou collapses.
    """
    area = rec.area()
    if area <= 0.0:
        return 0.0
    return intersection_area(rec, bg) / area


def mean_box(history: Sequence[Box]) -> Box:
    """Coordinate-wise arithmetic mean of a non-empty box sequence."""
    if not history:
        raise ValueError("empty trajectory")
    arr = np.array([b.to_list() for b in history], dtype=np.float64)
    m = arr.mean(axis=0)
    return Box(float(m[0]), float(m[1]), float(m[2]), float(m[3]))


@dataclass(frozen=True)
class RleMask:
    """Uncompressed row-major run-length mask, background run first."""

    height: int
    width: int
    counts: tuple[int, ...]

    def __post_init__(self):
        if self.height < 0 or self.width < 0:
            raise ValueError("negative mask dimensions")
        if any(c < 0 for c in self.counts):
            raise ValueError("negative run length")
        if sum(self.counts) != self.height * self.width:
            raise ValueError(
                f"run lengths sum to {sum(self.counts)}, "
                f"expected {self.height * self.width}"
            )

    def decode(self) -> np.ndarray:
        """Binary (height, width) grid; even-indexed runs are background."""
        values = np.arange(len(self.counts)) % 2
        flat = np.repeat(values, np.asarray(self.counts, dtype=np.int64))
        return flat.astype(bool).reshape(self.height, self.width)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "RleMask":
        a = np.asarray(arr).astype(bool)
        if a.ndim != 2:
            raise ValueError("mask array must be 2-D")
        h, w = a.shape
        flat = a.ravel()
        if flat.size == 0:
            return cls(h, w, (0,))
        changes = np.flatnonzero(np.diff(flat.view(np.int8))) + 1
        bounds = np.concatenate(([0], changes, [flat.size]))
        runs = np.diff(bounds).tolist()
        if flat[0]:
            runs = [0] + runs
        return cls(h, w, tuple(int(r) for r in runs))

    @classmethod
    def all_background(cls, height: int, width: int) -> "RleMask":
        return cls(height, width, (height * width,))

    def foreground_pixels(self) -> int:
        return int(sum(self.counts[1::2]))


def union_masks(masks: Iterable[RleMask], height: int, width: int) -> RleMask:
    """Pixel-wise OR of masks sharing (height, width); empty input is all background."""
    acc = None
    for m in masks:
        if (m.height, m.width) != (height, width):
            raise ValueError(
                f"mask dimensions {(m.height, m.width)} != {(height, width)}"
            )
        d = m.decode()
        acc = d if acc is None else (acc | d)
    if acc is None:
        return RleMask.all_background(height, width)
    return RleMask.from_array(acc)


def rasterize_box(box: Box, height: int, width: int) -> np.ndarray:
    """Fill the box region on a (height, width) grid, rounding half up."""
    grid = np.zeros((height, width), dtype=bool)
    x1 = max(0, int(np.floor(box.x1 + 0.5)))
    y1 = max(0, int(np.floor(box.y1 + 0.5)))
    x2 = min(width, int(np.floor(box.x2 + 0.5)))
    y2 = min(height, int(np.floor(box.y2 + 0.5)))
    if x2 > x1 and y2 > y1:
        grid[y1:y2, x1:x2] = True
    return grid


def box_mask(box: Box, height: int, width: int) -> RleMask:
    return RleMask.from_array(rasterize_box(box, height, width))
