"""8-bit single-channel image I/O. Binary PGM (P5) is handled natively;
other formats fall back to pillow when it is installed.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Union

import numpy as np

Pathish = Union[str, Path]


def write_pgm(path: Pathish, arr: np.ndarray) -> None:
    a = np.asarray(arr)
    if a.ndim != 2:
        raise ValueError("image must be 2-D")
    a = a.astype(np.uint8)
    h, w = a.shape
    with open(path, "wb") as fp:
        fp.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fp.write(a.tobytes())


def _read_pgm(path: Pathish) -> np.ndarray:
    data = Path(path).read_bytes()
    if not data.startswith(b"P5"):
        raise ValueError(f"{path}: not a binary PGM")
    # header: magic, width, height, maxval; '#' comments allowed between tokens
    tokens = []
    pos = 2
    while len(tokens) < 3:
        m = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\d+)").match(data, pos)
        if m is None:
            raise ValueError(f"{path}: truncated PGM header")
        tokens.append(int(m.group(1)))
        pos = m.end()
    w, h, maxval = tokens
    if maxval > 255:
        raise ValueError(f"{path}: only 8-bit PGM supported")
    pos += 1  # single whitespace after maxval
    pixels = np.frombuffer(data, dtype=np.uint8, count=h * w, offset=pos)
    return pixels.reshape(h, w).copy()


def read_gray(path: Pathish) -> np.ndarray:
    """Read an 8-bit single-channel image as a (h, w) uint8 array."""
    p = Path(path)
    if p.suffix.lower() == ".pgm":
        return _read_pgm(p)
    try:
        from PIL import Image
    except ImportError as exc:
        raise ValueError(
            f"{path}: reading {p.suffix} images requires pillow"
        ) from exc
    with Image.open(p) as img:
        return np.asarray(img.convert("L"), dtype=np.uint8)
