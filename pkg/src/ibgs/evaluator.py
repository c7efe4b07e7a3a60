"""Change-detection scoring against 5-level ground truth.

Ground-truth grayscale levels: 0 static, 50 shadow, 85 outside the region of
interest, 170 unknown, 255 moving. Static and shadow count as negatives,
moving as positives, and 85/170 pixels are ignored. Shadow pixels are also
tallied separately so the shadow false-positive rate can be reported.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .images import read_gray

GT_STATIC = 0
GT_SHADOW = 50
GT_NON_ROI = 85
GT_UNKNOWN = 170
GT_MOVING = 255
LEGAL_GT_VALUES = frozenset({GT_STATIC, GT_SHADOW, GT_NON_ROI, GT_UNKNOWN, GT_MOVING})


class EvalError(ValueError):
    pass


@dataclass(frozen=True)
class EvalCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0
    nb_shadow: int = 0
    nb_shadow_error: int = 0

    def __add__(self, other: "EvalCounts") -> "EvalCounts":
        return EvalCounts(
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            fn=self.fn + other.fn,
            tn=self.tn + other.tn,
            nb_shadow=self.nb_shadow + other.nb_shadow,
            nb_shadow_error=self.nb_shadow_error + other.nb_shadow_error,
        )

    def to_dict(self) -> dict[str, int]:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "tn": self.tn,
            "nb_shadow": self.nb_shadow,
            "nb_shadow_error": self.nb_shadow_error,
        }


def validate_gt(gt: np.ndarray) -> np.ndarray:
    arr = np.asarray(gt)
    if arr.ndim != 2:
        raise EvalError("ground truth must be a 2-D grid")
    bad = set(np.unique(arr)) - LEGAL_GT_VALUES
    if bad:
        raise EvalError(f"illegal ground-truth values: {sorted(int(v) for v in bad)}")
    return arr


def accumulate(gt: np.ndarray, pred: np.ndarray, counts: EvalCounts) -> EvalCounts:
    """Score one frame and add it to the running counters (pure)."""
    arr = validate_gt(gt)
    p = np.asarray(pred).astype(bool)
    if p.shape != arr.shape:
        raise EvalError(f"prediction shape {p.shape} != ground truth {arr.shape}")
    positive = arr == GT_MOVING
    negative = (arr == GT_STATIC) | (arr == GT_SHADOW)
    shadow = arr == GT_SHADOW
    frame = EvalCounts(
        tp=int(np.count_nonzero(positive & p)),
        fn=int(np.count_nonzero(positive & ~p)),
        fp=int(np.count_nonzero(negative & p)),
        tn=int(np.count_nonzero(negative & ~p)),
        nb_shadow=int(np.count_nonzero(shadow)),
        nb_shadow_error=int(np.count_nonzero(shadow & p)),
    )
    return counts + frame


@dataclass(frozen=True)
class Metrics:
    recall: Optional[float]
    precision: Optional[float]
    f_measure: Optional[float]
    fpr_s: Optional[float]

    def to_dict(self) -> dict[str, Optional[float]]:
        return {
            "recall": self.recall,
            "precision": self.precision,
            "f_measure": self.f_measure,
            "fpr_s": self.fpr_s,
        }


def _ratio(num: int, den: int) -> Optional[float]:
    # 0/0 is undefined, deliberately distinct from 0
    return None if den == 0 else num / den


def metrics(counts: EvalCounts) -> Metrics:
    recall = _ratio(counts.tp, counts.tp + counts.fn)
    precision = _ratio(counts.tp, counts.tp + counts.fp)
    if recall is None or precision is None or precision + recall == 0.0:
        f_measure = None
    else:
        f_measure = 2.0 * precision * recall / (precision + recall)
    fpr_s = _ratio(counts.nb_shadow_error, counts.nb_shadow)
    return Metrics(recall=recall, precision=precision, f_measure=f_measure, fpr_s=fpr_s)


def _mean_defined(values: Sequence[Optional[float]]) -> Optional[float]:
    defined = [v for v in values if v is not None]
    if not defined:
        return None
    return sum(defined) / len(defined)


def aggregate(
    per_video: dict[str, EvalCounts], grouping: dict[str, str]
) -> dict:
    """Per-video, per-category, and overall report rows.

    Recall/precision/F are unweighted means over the videos of a category and
    then over categories; the shadow rate is a ratio of summed counters, which
    is how it is defined for a video or a whole category.
    """
    videos = {}
    categories: dict[str, list[str]] = {}
    for name in sorted(per_video):
        category = grouping.get(name, "uncategorized")
        categories.setdefault(category, []).append(name)
        m = metrics(per_video[name])
        videos[name] = {
            "category": category,
            **m.to_dict(),
            "counts": per_video[name].to_dict(),
        }

    category_rows = {}
    for category in sorted(categories):
        names = categories[category]
        summed = sum((per_video[n] for n in names), EvalCounts())
        category_rows[category] = {
            "recall": _mean_defined([videos[n]["recall"] for n in names]),
            "precision": _mean_defined([videos[n]["precision"] for n in names]),
            "f_measure": _mean_defined([videos[n]["f_measure"] for n in names]),
            "fpr_s": _ratio(summed.nb_shadow_error, summed.nb_shadow),
            "videos": names,
        }

    total = sum(per_video.values(), EvalCounts())
    overall = {
        "recall": _mean_defined([r["recall"] for r in category_rows.values()]),
        "precision": _mean_defined([r["precision"] for r in category_rows.values()]),
        "f_measure": _mean_defined([r["f_measure"] for r in category_rows.values()]),
        "fpr_s": _ratio(total.nb_shadow_error, total.nb_shadow),
    }
    return {"videos": videos, "categories": category_rows, "overall": overall}


def format_report_table(report: dict) -> str:
    def fmt(v: Optional[float]) -> str:
        return "   -  " if v is None else f"{v:.4f}"

    lines = [f"{'name':<28} {'Re':>6} {'Pr':>6} {'F-M':>6} {'FPR-S':>6}"]
    for name, row in report["videos"].items():
        lines.append(
            f"{name:<28} {fmt(row['recall'])} {fmt(row['precision'])} "
            f"{fmt(row['f_measure'])} {fmt(row['fpr_s'])}"
        )
    for name, row in report["categories"].items():
        lines.append(
            f"[{name}]{'':<{max(0, 26 - len(name))}} {fmt(row['recall'])} "
            f"{fmt(row['precision'])} {fmt(row['f_measure'])} {fmt(row['fpr_s'])}"
        )
    row = report["overall"]
    lines.append(
        f"{'OVERALL':<28} {fmt(row['recall'])} {fmt(row['precision'])} "
        f"{fmt(row['f_measure'])} {fmt(row['fpr_s'])}"
    )
    return "\n".join(lines) + "\n"


_FRAME_INDEX = re.compile(r"(\d+)")


def _index_files(directory: Path) -> dict[int, Path]:
    out = {}
    for p in sorted(directory.iterdir()):
        if not p.is_file():
            continue
        m = _FRAME_INDEX.search(p.stem)
        if m:
            out[int(m.group(1))] = p
    return out


def score_directories(
    masks_dir: Union[str, Path],
    gt_dir: Union[str, Path],
    eval_start: Optional[int] = None,
) -> EvalCounts:
    """Score every ground-truth frame against its mask file, paired by frame number."""
    masks_dir, gt_dir = Path(masks_dir), Path(gt_dir)
    if not gt_dir.is_dir():
        raise EvalError(f"ground-truth directory not found: {gt_dir}")
    if not masks_dir.is_dir():
        raise EvalError(f"masks directory not found: {masks_dir}")
    gt_files = _index_files(gt_dir)
    mask_files = _index_files(masks_dir)
    if not gt_files:
        raise EvalError(f"no ground-truth frames in {gt_dir}")
    counts = EvalCounts()
    for k in sorted(gt_files):
        if eval_start is not None and k < eval_start:
            continue
        if k not in mask_files:
            raise EvalError(f"missing mask for frame {k:06d}")
        gt = read_gray(gt_files[k])
        pred = read_gray(mask_files[k]) > 127
        counts = accumulate(gt, pred, counts)
    return counts


def write_report(report: dict, json_path: Union[str, Path]) -> None:
    path = Path(json_path)
    path.write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    path.with_suffix(".txt").write_text(format_report_table(report), encoding="utf-8")
