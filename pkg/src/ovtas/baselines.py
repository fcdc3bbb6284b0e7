"""Training-free baselines: random labels and the equal-splits family.

The equal-splits baselines partition the timeline into K contiguous bins
(edges floor(k*T/K)) and pick one label per bin, either by mean similarity,
by majority vote of per-frame winners, or by a dynamic program that adds a
penalty for repeating the same label in adjacent bins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FrameLabeling, SimilarityMatrix

__all__ = [
    "BinPartition",
    "random_uniform",
    "equal_bins",
    "es_mean",
    "es_vote",
    "es_nrp",
]


@dataclass(frozen=True)
class BinPartition:
    """K contiguous timeline bins with edges floor(k*T/K), k = 0..K."""

    num_frames: int
    edges: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64)
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)

    @property
    def num_bins(self) -> int:
        return len(self.edges) - 1

    def bin_slices(self) -> list[slice]:
        return [
            slice(int(self.edges[k]), int(self.edges[k + 1]))
            for k in range(self.num_bins)
        ]

    def expand(self, bin_labels: np.ndarray, num_actions: int) -> FrameLabeling:
        """Broadcast one label per bin back to per-frame labels."""
        labels = np.empty(self.num_frames, dtype=np.int64)
        for k, sl in enumerate(self.bin_slices()):
            labels[sl] = bin_labels[k]
        return FrameLabeling(labels=labels, num_actions=num_actions)


def random_uniform(num_frames: int, num_actions: int, seed: int) -> FrameLabeling:
    """Independent uniform label draw per frame, seeded."""
    if num_actions < 1:
        raise ValueError("need at least one action")
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, num_actions, size=num_frames)
    return FrameLabeling(labels=labels, num_actions=num_actions)


def equal_bins(num_frames: int, num_bins: int) -> BinPartition:
    """Split ``num_frames`` frames into ``num_bins`` contiguous bins."""
    if num_bins < 1:
        raise ValueError("need at least one bin")
    if num_bins > num_frames:
        raise ValueError(
            f"cannot split {num_frames} frames into {num_bins} non-empty bins"
        )
    edges = (np.arange(num_bins + 1, dtype=np.int64) * num_frames) // num_bins
    return BinPartition(num_frames=num_frames, edges=edges)


def _bin_mean_scores(sim: SimilarityMatrix, partition: BinPartition) -> np.ndarray:
    """Per-bin mean similarity for every class: shape (K, N)."""
    return np.stack(
        [sim.values[sl].mean(axis=0) for sl in partition.bin_slices()], axis=0
    )


def es_mean(sim: SimilarityMatrix, num_bins: int) -> FrameLabeling:
    """Label each bin with the class of highest mean similarity."""
    partition = equal_bins(sim.num_frames, num_bins)
    scores = _bin_mean_scores(sim, partition)
    return partition.expand(np.argmax(scores, axis=1), sim.num_actions)


def es_vote(sim: SimilarityMatrix, num_bins: int) -> FrameLabeling:
    """Label each bin with the modal per-frame winner.

    Modal ties break toward the class with larger bin-mean similarity, then
    toward the lower class index.
    """
    partition = equal_bins(sim.num_frames, num_bins)
    means = _bin_mean_scores(sim, partition)
    winners = np.argmax(sim.values, axis=1)
    bin_labels = np.empty(partition.num_bins, dtype=np.int64)
    for k, sl in enumerate(partition.bin_slices()):
        counts = np.bincount(winners[sl], minlength=sim.num_actions)
        top = counts.max()
        tied = np.flatnonzero(counts == top)
        if len(tied) == 1:
            bin_labels[k] = tied[0]
        else:
            tied_means = means[k, tied]
            bin_labels[k] = tied[np.argmax(tied_means)]
    return partition.expand(bin_labels, sim.num_actions)


def es_nrp(sim: SimilarityMatrix, num_bins: int, penalty: float) -> FrameLabeling:
    """Equal splits with a non-repetition penalty, decoded exactly.

    Maximizes sum of bin-mean scores minus ``penalty`` for every adjacent
    pair of equal bin labels. Solved by a suffix dynamic program with the
    best/second-best trick (O(K*N)), then reconstructed front to back so
    that score ties yield the lexicographically smallest optimal path.
    """
    if penalty < 0:
        raise ValueError("penalty must be >= 0")
    partition = equal_bins(sim.num_frames, num_bins)
    scores = _bin_mean_scores(sim, partition)
    num_actions = sim.num_actions

    # suffix[k][c] = best achievable total over bins k..K-1 given label c at bin k.
    suffix = np.empty_like(scores)
    suffix[-1] = scores[-1]
    for k in range(partition.num_bins - 2, -1, -1):
        nxt = suffix[k + 1]
        best_idx = int(np.argmax(nxt))
        best_val = nxt[best_idx]
        masked = nxt.copy()
        masked[best_idx] = -np.inf
        second_val = masked.max() if num_actions > 1 else -np.inf
        # Continuation value per label: switch to the best other label, or
        # repeat the same label and pay the penalty.
        switch = np.where(np.arange(num_actions) == best_idx, second_val, best_val)
        suffix[k] = scores[k] + np.maximum(switch, nxt - penalty)

    bin_labels = np.empty(partition.num_bins, dtype=np.int64)
    bin_labels[0] = int(np.argmax(suffix[0]))
    for k in range(1, partition.num_bins):
        continuation = suffix[k].copy()
        continuation[bin_labels[k - 1]] -= penalty
        bin_labels[k] = int(np.argmax(continuation))
    return partition.expand(bin_labels, num_actions)
