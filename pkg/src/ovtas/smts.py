"""Stage 2: similarity-matrix temporal segmentation.

Turns a frame-action similarity matrix into temporally consistent labels by
solving a balanced entropy-regularized transport problem between uniform
frame mass (1/T per frame) and uniform action mass (1/N per action). The
cost couples visual dissimilarity (1 - similarity) with a monotone-alignment
prior |i/T - j/N|, and the coupling is computed with log-stabilized Sinkhorn
updates. Frame labels are the per-row argmax of the coupling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FrameLabeling, SimilarityMatrix, TransportPlan
from .faes import softmax_rows

__all__ = [
    "HyperParams",
    "SinkhornResult",
    "SegmentationResult",
    "temporal_prior",
    "build_cost",
    "sinkhorn",
    "decode",
    "segment_video",
]


@dataclass(frozen=True)
class HyperParams:
    """Solver knobs: entropy weight, prior weight, iteration cap, tolerance."""

    epsilon: float = 0.07
    rho: float = 0.04
    max_iters: int = 1000
    tol: float = 1e-6

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if self.rho < 0:
            raise ValueError("rho must be >= 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be > 0")


@dataclass(frozen=True)
class SinkhornResult:
    plan: TransportPlan
    converged: bool
    iterations: int
    marginal_violation: float


@dataclass(frozen=True)
class SegmentationResult:
    labeling: FrameLabeling
    solver: SinkhornResult | None


def temporal_prior(num_frames: int, num_actions: int) -> np.ndarray:
    """Monotone-alignment penalty: entry (i, j) = |i/T - j/N|, zero-based."""
    if num_frames < 1 or num_actions < 1:
        raise ValueError("temporal prior needs at least one frame and one action")
    frame_pos = np.arange(num_frames, dtype=np.float64) / num_frames
    action_pos = np.arange(num_actions, dtype=np.float64) / num_actions
    return np.abs(frame_pos[:, None] - action_pos[None, :])


def build_cost(sim: SimilarityMatrix, prior: np.ndarray, rho: float) -> np.ndarray:
    """Transport cost: visual term (1 - similarity) plus rho-weighted prior."""
    if prior.shape != sim.values.shape:
        raise ValueError(
            f"prior shape {prior.shape} does not match similarities {sim.values.shape}"
        )
    return (1.0 - sim.values) + rho * prior


def sinkhorn(cost: np.ndarray, hp: HyperParams) -> SinkhornResult:
    """Balanced entropic transport with uniform marginals, solved in log space.

    Alternates the dual-potential updates on log-scaled variables so that no
    exponential is ever taken of a large positive argument. Feasibility is
    checked every 10 iterations; if the loop hits ``max_iters`` first, the
    current iterate is returned with ``converged=False`` and its violation,
    so evaluation runs degrade gracefully instead of aborting.
    """
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2:
        raise ValueError(f"cost must be 2-D, got shape {cost.shape}")
    if not np.isfinite(cost).all():
        raise ValueError("cost matrix contains non-finite values")
    num_frames, num_actions = cost.shape

    log_row_mass = -np.log(num_frames)
    log_col_mass = -np.log(num_actions)
    scaled = cost / hp.epsilon
    # Scaled dual potentials; log(plan) = row_pot[:, None] + col_pot[None, :] - scaled.
    row_pot = np.zeros(num_frames)
    col_pot = np.zeros(num_actions)

    def logsumexp(arr: np.ndarray, axis: int) -> np.ndarray:
        peak = arr.max(axis=axis, keepdims=True)
        out = np.log(np.exp(arr - peak).sum(axis=axis)) + np.squeeze(peak, axis=axis)
        return out

    iterations = 0
    converged = False
    violation = np.inf
    for iteration in range(1, hp.max_iters + 1):
        col_pot = log_col_mass - logsumexp(row_pot[:, None] - scaled, axis=0)
        row_pot = log_row_mass - logsumexp(col_pot[None, :] - scaled, axis=1)
        iterations = iteration
        if iteration % 10 == 0 or iteration == hp.max_iters:
            plan_mass = np.exp(row_pot[:, None] + col_pot[None, :] - scaled)
            row_err = np.abs(plan_mass.sum(axis=1) - 1.0 / num_frames).max()
            col_err = np.abs(plan_mass.sum(axis=0) - 1.0 / num_actions).max()
            violation = float(max(row_err, col_err))
            if violation < hp.tol:
                converged = True
                break

    plan_mass = np.exp(row_pot[:, None] + col_pot[None, :] - scaled)
    # Guard against residual drift of the total mass before the invariant check.
    plan_mass = plan_mass / plan_mass.sum()
    return SinkhornResult(
        plan=TransportPlan(plan_mass),
        converged=converged,
        iterations=iterations,
        marginal_violation=violation,
    )


def decode(plan: TransportPlan) -> FrameLabeling:
    """Label each frame with the action holding its largest coupling mass.

    Ties break toward the lowest action index.
    """
    labels = np.argmax(plan.mass, axis=1)
    return FrameLabeling(labels=labels, num_actions=plan.num_actions)


def segment_video(
    sim: SimilarityMatrix,
    hp: HyperParams,
    *,
    ablate_prior: bool = False,
    ablate_stage2: bool = False,
    action_order: np.ndarray | None = None,
) -> SegmentationResult:
    """Run stage 2 on one video's similarity matrix.

    ``action_order`` is a permutation of the action indices: the solver sees
    columns in that order (the prior then ranks actions by their shuffled
    position) and the decoded labels are mapped back so the output always
    refers to the caller's original action indices. With action-set
    supervision the caller draws this order at random per video.

    ``ablate_stage2`` bypasses the solver entirely (per-frame argmax of the
    softmax probabilities); ``ablate_prior`` keeps the solver but zeroes the
    prior term.
    """
    num_frames, num_actions = sim.values.shape
    if action_order is not None:
        order = np.asarray(action_order, dtype=np.int64)
        if sorted(order.tolist()) != list(range(num_actions)):
            raise ValueError("action_order must be a permutation of the action indices")
    else:
        order = np.arange(num_actions, dtype=np.int64)

    if ablate_stage2:
        probs = softmax_rows(sim)
        labels = np.argmax(probs.values, axis=1)
        return SegmentationResult(
            labeling=FrameLabeling(labels=labels, num_actions=num_actions),
            solver=None,
        )

    if num_actions == 1:
        labels = np.zeros(num_frames, dtype=np.int64)
        return SegmentationResult(
            labeling=FrameLabeling(labels=labels, num_actions=1), solver=None
        )

    shuffled = SimilarityMatrix(sim.values[:, order], bounded=sim.bounded)
    if ablate_prior:
        prior = np.zeros((num_frames, num_actions))
    else:
        prior = temporal_prior(num_frames, num_actions)
    cost = build_cost(shuffled, prior, hp.rho)
    result = sinkhorn(cost, hp)
    decoded = decode(result.plan)
    labels = order[decoded.labels]
    return SegmentationResult(
        labeling=FrameLabeling(labels=labels, num_actions=num_actions),
        solver=result,
    )
