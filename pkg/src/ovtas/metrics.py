"""Frame accuracy, segmental edit score, overlap F1, and their aggregation.

All metrics are percentages in [0, 100]. Edit and F1 operate on run-length
segment views: edit is a normalized unit-cost Levenshtein distance over
segment-label sequences (durations ignored); F1 greedily matches predicted
segments in temporal order against unmatched same-class ground-truth
segments by frame IoU.

An optional ``ignore_index`` drops a background class: its frames are
excluded from accuracy and its segments from the edit/F1 segment views.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import FrameLabeling, Segment, segments_of

__all__ = [
    "VideoMetrics",
    "frame_accuracy",
    "edit_score",
    "f1_at",
    "compute_video_metrics",
    "aggregate",
    "aggregate_splits",
]

F1_THRESHOLDS = (0.10, 0.25, 0.50)


@dataclass(frozen=True)
class VideoMetrics:
    """The five reported metrics; ``avg`` is always their arithmetic mean."""

    acc: float
    edit: float
    f1_10: float
    f1_25: float
    f1_50: float

    def __post_init__(self):
        for name in ("acc", "edit", "f1_10", "f1_25", "f1_50"):
            value = getattr(self, name)
            if not 0.0 <= value <= 100.0:
                raise ValueError(f"{name}={value} outside [0, 100]")

    @property
    def avg(self) -> float:
        return (self.acc + self.edit + self.f1_10 + self.f1_25 + self.f1_50) / 5.0

    def as_dict(self) -> dict[str, float]:
        return {
            "acc": self.acc,
            "edit": self.edit,
            "f1_10": self.f1_10,
            "f1_25": self.f1_25,
            "f1_50": self.f1_50,
            "avg": self.avg,
        }


def _check_pair(pred: FrameLabeling, gt: FrameLabeling) -> None:
    if pred.num_frames != gt.num_frames:
        raise ValueError(
            f"length mismatch: pred {pred.num_frames} vs gt {gt.num_frames}"
        )
    if pred.num_actions != gt.num_actions:
        raise ValueError(
            f"vocabulary mismatch: pred {pred.num_actions} vs gt {gt.num_actions}"
        )


def frame_accuracy(
    pred: FrameLabeling, gt: FrameLabeling, *, ignore_index: int | None = None
) -> float:
    """Percentage of frames labeled correctly."""
    _check_pair(pred, gt)
    pred_labels, gt_labels = pred.labels, gt.labels
    if ignore_index is not None:
        keep = gt_labels != ignore_index
        if not keep.any():
            return 100.0
        pred_labels, gt_labels = pred_labels[keep], gt_labels[keep]
    return 100.0 * float(np.mean(pred_labels == gt_labels))


def _segment_view(
    labeling: FrameLabeling, ignore_index: int | None
) -> list[Segment]:
    segs = segments_of(labeling)
    if ignore_index is None:
        return segs
    return [s for s in segs if s.label != ignore_index]


def _levenshtein(a: Sequence[int], b: Sequence[int]) -> int:
    """Unit-cost edit distance, iterative two-row DP."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        current = [i]
        for j, y in enumerate(b, start=1):
            if x == y:
                current.append(previous[j - 1])
            else:
                current.append(1 + min(previous[j - 1], previous[j], current[-1]))
        previous = current
    return previous[-1]


def edit_score(
    pred: FrameLabeling, gt: FrameLabeling, *, ignore_index: int | None = None
) -> float:
    """Normalized segmental edit score over segment-label sequences."""
    pred_labels = [s.label for s in _segment_view(pred, ignore_index)]
    gt_labels = [s.label for s in _segment_view(gt, ignore_index)]
    longest = max(len(pred_labels), len(gt_labels))
    if longest == 0:
        return 100.0
    distance = _levenshtein(pred_labels, gt_labels)
    return max(0.0, 100.0 * (1.0 - distance / longest))


def _segment_iou(a: Segment, b: Segment) -> float:
    inter = min(a.end, b.end) - max(a.start, b.start)
    if inter <= 0:
        return 0.0
    union = max(a.end, b.end) - min(a.start, b.start)
    return inter / union


def f1_at(
    pred: FrameLabeling,
    gt: FrameLabeling,
    tau: float,
    *,
    ignore_index: int | None = None,
) -> float:
    """Segment-level F1 at IoU threshold ``tau``.

    Greedy temporal-order matching with a per-class one-to-one constraint:
    each predicted segment takes the earliest not-yet-matched ground-truth
    segment of its class whose frame IoU reaches ``tau`` (a true positive),
    or counts as a false positive when none qualifies. Ground-truth segments
    left unmatched are false negatives.

    Because same-class segments of two labelings form non-crossing interval
    families, taking the earliest eligible segment attains the maximum
    possible true-positive count, so this one-pass greedy equals the optimal
    one-to-one assignment.
    """
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must be in (0, 1), got {tau}")
    pred_segs = _segment_view(pred, ignore_index)
    gt_segs = _segment_view(gt, ignore_index)

    matched = [False] * len(gt_segs)
    tp = 0
    fp = 0
    for pseg in pred_segs:
        hit = -1
        for idx, gseg in enumerate(gt_segs):
            if matched[idx] or gseg.label != pseg.label:
                continue
            if _segment_iou(pseg, gseg) >= tau:
                hit = idx
                break
        if hit >= 0:
            matched[hit] = True
            tp += 1
        else:
            fp += 1
    fn = len(gt_segs) - tp

    denom = 2 * tp + fp + fn
    if denom == 0:
        return 0.0
    return 100.0 * 2 * tp / denom


def compute_video_metrics(
    pred: FrameLabeling, gt: FrameLabeling, *, ignore_index: int | None = None
) -> VideoMetrics:
    """All five metrics for one video."""
    _check_pair(pred, gt)
    f1_10, f1_25, f1_50 = (
        f1_at(pred, gt, tau, ignore_index=ignore_index) for tau in F1_THRESHOLDS
    )
    return VideoMetrics(
        acc=frame_accuracy(pred, gt, ignore_index=ignore_index),
        edit=edit_score(pred, gt, ignore_index=ignore_index),
        f1_10=f1_10,
        f1_25=f1_25,
        f1_50=f1_50,
    )


def aggregate(per_video: Iterable[VideoMetrics]) -> VideoMetrics:
    """Unweighted per-metric mean over a collection of videos."""
    items = list(per_video)
    if not items:
        raise ValueError("cannot aggregate an empty collection")
    return VideoMetrics(
        acc=float(np.mean([m.acc for m in items])),
        edit=float(np.mean([m.edit for m in items])),
        f1_10=float(np.mean([m.f1_10 for m in items])),
        f1_25=float(np.mean([m.f1_25 for m in items])),
        f1_50=float(np.mean([m.f1_50 for m in items])),
    )


def aggregate_splits(per_split: Sequence[Sequence[VideoMetrics]]) -> VideoMetrics:
    """Mean over videos within each split, then unweighted mean over splits."""
    if not per_split:
        raise ValueError("cannot aggregate an empty collection")
    return aggregate([aggregate(videos) for videos in per_split])
