"""Stage 1: frame-action embedding similarity.

Row normalization, cosine similarity between frame and action embeddings,
row-wise softmax, and the stage-1 scrambling ablation.
"""

from __future__ import annotations

import numpy as np

from .core import EmbeddingMatrix, ProbMatrix, SimilarityMatrix

__all__ = [
    "l2_normalize_rows",
    "cosine_similarity",
    "softmax_rows",
    "permutation_pair",
    "permute_ablation",
]

_DEGENERATE_NORM = 1e-12


def l2_normalize_rows(matrix: EmbeddingMatrix) -> EmbeddingMatrix:
    """Scale every row to unit L2 norm.

    A row with norm below 1e-12 is rejected rather than silently zeroed.
    """
    norms = np.linalg.norm(matrix.data, axis=1)
    bad = np.flatnonzero(norms < _DEGENERATE_NORM)
    if bad.size:
        raise ValueError(f"degenerate embedding row at index {int(bad[0])}")
    return EmbeddingMatrix(matrix.data / norms[:, None], normalized=True)


def cosine_similarity(
    frames: EmbeddingMatrix,
    actions: EmbeddingMatrix,
    *,
    skip_l2: bool = False,
) -> SimilarityMatrix:
    """Dot-product similarities between frame rows and action rows.

    Both inputs must be unit-normalized unless ``skip_l2`` is set, which is
    the normalization ablation: raw dot products, no [-1, 1] guarantee.
    """
    if frames.cols != actions.cols:
        raise ValueError(
            f"embedding dims differ: frames {frames.cols} vs actions {actions.cols}"
        )
    if not skip_l2 and not (frames.normalized and actions.normalized):
        raise ValueError("inputs must be L2-normalized (or pass skip_l2=True)")
    values = frames.data @ actions.data.T
    return SimilarityMatrix(values, bounded=frames.normalized and actions.normalized)


def softmax_rows(sim: SimilarityMatrix) -> ProbMatrix:
    """Row-wise softmax over actions, with max-subtraction for stability."""
    logits = sim.values
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return ProbMatrix(exp / exp.sum(axis=1, keepdims=True))


def permutation_pair(
    num_frames: int, num_actions: int, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Seeded independent row permutations used by the stage-1 ablation."""
    rng = np.random.default_rng(seed)
    return rng.permutation(num_frames), rng.permutation(num_actions)


def permute_ablation(
    frames: EmbeddingMatrix,
    actions: EmbeddingMatrix,
    seed: int,
    *,
    scramble_features: bool = False,
) -> tuple[EmbeddingMatrix, EmbeddingMatrix]:
    """Stage-1 ablation: destroy the frame/action correspondence.

    Default mode permutes whole rows of each matrix independently, keeping
    the multiset of embeddings intact. ``scramble_features`` instead permutes
    the feature dimensions within each matrix (one shared permutation per
    matrix), destroying the coordinate alignment between frames and actions.
    """
    if scramble_features:
        rng = np.random.default_rng(seed)
        frame_perm = rng.permutation(frames.cols)
        action_perm = rng.permutation(actions.cols)
        return (
            EmbeddingMatrix(frames.data[:, frame_perm], normalized=frames.normalized),
            EmbeddingMatrix(actions.data[:, action_perm], normalized=actions.normalized),
        )
    frame_perm, action_perm = permutation_pair(frames.rows, actions.rows, seed)
    return (
        EmbeddingMatrix(frames.data[frame_perm], normalized=frames.normalized),
        EmbeddingMatrix(actions.data[action_perm], normalized=actions.normalized),
    )
