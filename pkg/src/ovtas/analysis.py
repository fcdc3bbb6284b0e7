"""Dataset statistics and metric breakdowns by video attribute bins."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Protocol, Sequence

from .core import FrameLabeling, segments_of
from .metrics import VideoMetrics, aggregate

__all__ = [
    "BinSpec",
    "MetricBin",
    "SummaryStats",
    "video_duration_stats",
    "segment_count_stats",
    "segment_duration_stats",
    "binned_metrics",
    "video_attributes",
]

DURATION_SECONDS = "duration_seconds"
GT_SEGMENT_COUNT = "gt_segment_count"
_DIMENSIONS = (DURATION_SECONDS, GT_SEGMENT_COUNT)


class AnnotatedVideo(Protocol):
    """What the statistics need from a loaded video."""

    id: str
    fps: float
    gt: FrameLabeling


@dataclass(frozen=True)
class SummaryStats:
    min: float
    max: float
    mean: float


@dataclass(frozen=True)
class BinSpec:
    """Half-open attribute bins; the last bin is open-ended.

    ``edges`` of length m define m bins: [e0, e1), ..., [e_{m-2}, e_{m-1}),
    and [e_{m-1}, inf).
    """

    dimension: str
    edges: tuple[float, ...]

    def __post_init__(self):
        if self.dimension not in _DIMENSIONS:
            raise ValueError(f"unknown bin dimension {self.dimension!r}")
        edges = tuple(float(e) for e in self.edges)
        if not edges:
            raise ValueError("need at least one bin edge")
        if any(b <= a for a, b in zip(edges, edges[1:])):
            raise ValueError("bin edges must be strictly ascending")
        object.__setattr__(self, "edges", edges)

    @property
    def num_bins(self) -> int:
        return len(self.edges)

    def bounds(self, index: int) -> tuple[float, float | None]:
        lo = self.edges[index]
        hi = self.edges[index + 1] if index + 1 < len(self.edges) else None
        return lo, hi

    def bin_index(self, value: float) -> int:
        if value < self.edges[0]:
            raise ValueError(f"value {value} below the first bin edge {self.edges[0]}")
        index = 0
        for i, edge in enumerate(self.edges):
            if value >= edge:
                index = i
        return index


@dataclass(frozen=True)
class MetricBin:
    index: int
    lo: float
    hi: float | None
    video_ids: tuple[str, ...]
    metrics: VideoMetrics


def _durations(videos: Iterable[AnnotatedVideo]) -> list[float]:
    out = []
    for video in videos:
        if video.fps is None or video.fps <= 0:
            raise ValueError(f"video {video.id!r} has no usable fps")
        out.append(video.gt.num_frames / video.fps)
    if not out:
        raise ValueError("no videos")
    return out


def _stats(values: Sequence[float]) -> SummaryStats:
    return SummaryStats(
        min=min(values), max=max(values), mean=sum(values) / len(values)
    )


def video_duration_stats(videos: Iterable[AnnotatedVideo]) -> SummaryStats:
    """Min/max/mean video duration in seconds (frames / fps)."""
    return _stats(_durations(videos))


def segment_count_stats(videos: Iterable[AnnotatedVideo]) -> SummaryStats:
    """Min/max/mean number of ground-truth segments per video."""
    counts = [len(segments_of(video.gt)) for video in videos]
    if not counts:
        raise ValueError("no videos")
    return _stats([float(c) for c in counts])


def segment_duration_stats(videos: Iterable[AnnotatedVideo]) -> SummaryStats:
    """Min/max/mean ground-truth segment duration in seconds, pooled."""
    durations = []
    for video in videos:
        if video.fps is None or video.fps <= 0:
            raise ValueError(f"video {video.id!r} has no usable fps")
        durations.extend(s.length / video.fps for s in segments_of(video.gt))
    if not durations:
        raise ValueError("no videos")
    return _stats(durations)


def video_attributes(video: AnnotatedVideo) -> dict[str, float]:
    """The binnable attributes of one annotated video."""
    if video.fps is None or video.fps <= 0:
        raise ValueError(f"video {video.id!r} has no usable fps")
    return {
        DURATION_SECONDS: video.gt.num_frames / video.fps,
        GT_SEGMENT_COUNT: float(len(segments_of(video.gt))),
    }


def binned_metrics(
    per_video: Sequence[tuple[str, Mapping[str, float], VideoMetrics]],
    spec: BinSpec,
) -> list[MetricBin]:
    """Group per-video metrics into attribute bins and aggregate each bin.

    Empty bins are omitted from the result. A video whose attribute falls
    below the first edge is an error naming the offending id.
    """
    buckets: dict[int, list[tuple[str, VideoMetrics]]] = {}
    for video_id, attributes, video_metrics in per_video:
        if spec.dimension not in attributes:
            raise ValueError(f"video {video_id!r} lacks attribute {spec.dimension!r}")
        value = attributes[spec.dimension]
        try:
            index = spec.bin_index(value)
        except ValueError as exc:
            raise ValueError(f"video {video_id!r} matches no bin: {exc}") from exc
        buckets.setdefault(index, []).append((video_id, video_metrics))

    bins = []
    for index in sorted(buckets):
        entries = buckets[index]
        lo, hi = spec.bounds(index)
        bins.append(
            MetricBin(
                index=index,
                lo=lo,
                hi=hi,
                video_ids=tuple(vid for vid, _ in entries),
                metrics=aggregate(m for _, m in entries),
            )
        )
    return bins
