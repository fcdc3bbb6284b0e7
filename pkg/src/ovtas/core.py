"""Shared value types for the segmentation engine.

Everything here is an immutable wrapper around a validated numpy array:
embedding matrices, frame-action similarity/probability matrices, transport
plans, and per-frame labelings with their run-length segment view.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "EmbeddingMatrix",
    "SimilarityMatrix",
    "ProbMatrix",
    "TransportPlan",
    "FrameLabeling",
    "Segment",
    "segments_of",
]


def _frozen_2d(values, dtype=np.float64) -> np.ndarray:
    arr = np.asarray(values, dtype=dtype)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"matrix must be at least 1x1, got shape {arr.shape}")
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Dense row-major matrix of frame or action embeddings.

    ``normalized`` records whether rows are unit length; it is set by
    :func:`ovtas.faes.l2_normalize_rows` and checked by consumers that
    require cosine geometry.
    """

    data: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        arr = _frozen_2d(self.data)
        if not np.isfinite(arr).all():
            raise ValueError("embedding matrix contains non-finite values")
        object.__setattr__(self, "data", arr)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class SimilarityMatrix:
    """Frame-by-action similarity scores.

    ``bounded`` means both inputs were unit-normalized, so every entry must
    lie in [-1, 1] up to a small numerical slack.
    """

    values: np.ndarray
    bounded: bool = False

    _SLACK = 1e-6

    def __post_init__(self):
        arr = _frozen_2d(self.values)
        if not np.isfinite(arr).all():
            raise ValueError("similarity matrix contains non-finite values")
        if self.bounded:
            lo, hi = float(arr.min()), float(arr.max())
            if lo < -1.0 - self._SLACK or hi > 1.0 + self._SLACK:
                raise ValueError(
                    f"cosine similarities outside [-1, 1]: range [{lo}, {hi}]"
                )
        object.__setattr__(self, "values", arr)

    @property
    def num_frames(self) -> int:
        return self.values.shape[0]

    @property
    def num_actions(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class ProbMatrix:
    """Per-frame probability distributions over actions (rows sum to 1)."""

    values: np.ndarray

    def __post_init__(self):
        arr = _frozen_2d(self.values)
        if not np.isfinite(arr).all():
            raise ValueError("probability matrix contains non-finite values")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("probabilities must lie in [0, 1]")
        row_sums = arr.sum(axis=1)
        if np.abs(row_sums - 1.0).max() > 1e-6:
            raise ValueError("probability rows must sum to 1 within 1e-6")
        object.__setattr__(self, "values", arr)

    @property
    def num_frames(self) -> int:
        return self.values.shape[0]

    @property
    def num_actions(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class TransportPlan:
    """Nonnegative coupling between frames and actions.

    Feasibility (row sums 1/T, column sums 1/N) is the solver's contract and
    is verified in tests rather than enforced here; construction only checks
    nonnegativity and unit total mass.
    """

    mass: np.ndarray

    def __post_init__(self):
        arr = _frozen_2d(self.mass)
        if not np.isfinite(arr).all():
            raise ValueError("transport plan contains non-finite values")
        if arr.min() < 0.0:
            raise ValueError("transport plan must be nonnegative")
        total = float(arr.sum())
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"transport plan total mass {total} != 1")
        object.__setattr__(self, "mass", arr)

    @property
    def num_frames(self) -> int:
        return self.mass.shape[0]

    @property
    def num_actions(self) -> int:
        return self.mass.shape[1]

    def marginal_violation(self) -> float:
        """Max deviation of row/column sums from the uniform marginals."""
        t, n = self.mass.shape
        row_err = np.abs(self.mass.sum(axis=1) - 1.0 / t).max()
        col_err = np.abs(self.mass.sum(axis=0) - 1.0 / n).max()
        return float(max(row_err, col_err))


@dataclass(frozen=True)
class Segment:
    """Maximal constant-label run: frames [start, end) share ``label``."""

    label: int
    start: int
    end: int

    def __post_init__(self):
        if not self.start < self.end:
            raise ValueError(f"segment must be non-empty: [{self.start}, {self.end})")

    @property
    def length(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class FrameLabeling:
    """Per-frame action indices plus the action-vocabulary size.

    ``label_names`` is the ordered vocabulary when known; synthetic labelings
    (solver outputs, baselines) may omit it.
    """

    labels: np.ndarray
    num_actions: int
    label_names: tuple[str, ...] | None = field(default=None)

    def __post_init__(self):
        arr = np.asarray(self.labels, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError(f"labels must be 1-D, got shape {arr.shape}")
        if arr.size == 0:
            raise ValueError("empty sequence")
        if self.num_actions < 1:
            raise ValueError("num_actions must be >= 1")
        if arr.min() < 0 or arr.max() >= self.num_actions:
            raise ValueError(
                f"labels must lie in [0, {self.num_actions}), "
                f"got range [{arr.min()}, {arr.max()}]"
            )
        if self.label_names is not None:
            names = tuple(self.label_names)
            if len(names) != self.num_actions:
                raise ValueError(
                    f"label_names has {len(names)} entries, expected {self.num_actions}"
                )
            object.__setattr__(self, "label_names", names)
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "labels", arr)

    @property
    def num_frames(self) -> int:
        return int(self.labels.size)

    def segments(self) -> list[Segment]:
        return segments_of(self)


def segments_of(labeling: FrameLabeling) -> list[Segment]:
    """Run-length view of a labeling: maximal constant runs in temporal order.

    Expanding the result frame by frame reconstructs the labeling exactly.
    """
    labels = labeling.labels
    if labels.size == 0:
        raise ValueError("empty sequence")
    boundaries = np.flatnonzero(np.diff(labels)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [labels.size]))
    return [
        Segment(label=int(labels[s]), start=int(s), end=int(e))
        for s, e in zip(starts, ends)
    ]
