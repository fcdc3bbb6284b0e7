"""End-to-end evaluation runs: load, segment, score, aggregate, report.

Every run is fully determined by its :class:`~ovtas.config.RunConfig`
(including the seed): per-video randomness is derived from the global seed
and the video id, so results are identical regardless of worker count or
manifest ordering.
"""

from __future__ import annotations

import hashlib
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import analysis, baselines, dataset_io, faes, metrics, smts
from .config import ES_METHODS, RunConfig, bin_preset
from .core import EmbeddingMatrix, FrameLabeling
from .dataset_io import Manifest, VideoEntry

__all__ = ["run_eval", "run_stats", "VideoResult", "derive_seed"]

log = logging.getLogger("ovtas")


def derive_seed(seed: int, purpose: str, video_id: str) -> int:
    """Stable per-video seed: hash of (global seed, purpose, video id)."""
    digest = hashlib.sha256(f"{seed}:{purpose}:{video_id}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


@dataclass(frozen=True)
class LoadedVideo:
    id: str
    activity: str
    fps: float
    gt: FrameLabeling


@dataclass(frozen=True)
class VideoResult:
    id: str
    activity: str
    fps: float
    num_frames: int
    duration_seconds: float
    gt_segment_count: int
    video_metrics: metrics.VideoMetrics | None
    solver: smts.SinkhornResult | None
    error: str | None


def _load_gt(manifest: Manifest, entry: VideoEntry) -> LoadedVideo:
    gt = dataset_io.read_gt(entry.gt_path, manifest.actions[entry.activity])
    return LoadedVideo(id=entry.id, activity=entry.activity, fps=entry.fps, gt=gt)


def _truncate_labeling(gt: FrameLabeling, num_frames: int) -> FrameLabeling:
    if num_frames == gt.num_frames:
        return gt
    return FrameLabeling(
        labels=gt.labels[:num_frames],
        num_actions=gt.num_actions,
        label_names=gt.label_names,
    )


def _load_embeddings(
    manifest: Manifest, entry: VideoEntry
) -> tuple[EmbeddingMatrix, EmbeddingMatrix]:
    if entry.frames_emb_path is None:
        raise ValueError(f"video {entry.id!r} declares no frame embeddings")
    if entry.activity not in manifest.action_emb_path:
        raise ValueError(
            f"activity {entry.activity!r} declares no action embeddings"
        )
    frames = dataset_io.read_emb(entry.frames_emb_path)
    actions = dataset_io.read_emb(manifest.action_emb_path[entry.activity])
    return frames, actions


def _segment_one(
    config: RunConfig, manifest: Manifest, entry: VideoEntry, gt: FrameLabeling
) -> tuple[FrameLabeling, FrameLabeling, smts.SinkhornResult | None]:
    """Produce (prediction, aligned ground truth, solver info) for one video."""
    method = config.method
    num_actions = len(manifest.actions[entry.activity])

    if method == "random_uniform":
        pred = baselines.random_uniform(
            gt.num_frames, num_actions, derive_seed(config.seed, "random", entry.id)
        )
        return pred, gt, None

    frames, actions = _load_embeddings(manifest, entry)
    effective = dataset_io.align_lengths(
        frames.rows, gt.num_frames, config.align_policy
    )
    if effective != frames.rows or effective != gt.num_frames:
        log.warning(
            "video %s: truncating to %d frames (embeddings %d, gt %d)",
            entry.id, effective, frames.rows, gt.num_frames,
        )
    if effective != frames.rows:
        frames = EmbeddingMatrix(frames.data[:effective], normalized=frames.normalized)
    gt = _truncate_labeling(gt, effective)

    if method == "ovtas" and config.permute_stage1:
        frames, actions = faes.permute_ablation(
            frames, actions, derive_seed(config.seed, "stage1", entry.id)
        )

    skip_l2 = method == "ovtas" and config.skip_l2
    if not skip_l2:
        frames = faes.l2_normalize_rows(frames)
        actions = faes.l2_normalize_rows(actions)
    sim = faes.cosine_similarity(frames, actions, skip_l2=skip_l2)

    if method in ES_METHODS:
        num_bins = config.k_bins if config.k_bins is not None else num_actions
        if method == "es_mean":
            pred = baselines.es_mean(sim, num_bins)
        elif method == "es_vote":
            pred = baselines.es_vote(sim, num_bins)
        else:
            pred = baselines.es_nrp(sim, num_bins, config.nrp_lambda)
        return pred, gt, None

    # ovtas / stage2_ablation: action order is randomized per video, since
    # only the action set (not its order) is assumed known.
    rng = np.random.default_rng(derive_seed(config.seed, "order", entry.id))
    order = rng.permutation(num_actions)
    result = smts.segment_video(
        sim,
        config.hp,
        ablate_prior=config.ablate_prior,
        ablate_stage2=(method == "stage2_ablation") or config.ablate_stage2,
        action_order=order,
    )
    return result.labeling, gt, result.solver


def _evaluate_video(
    config: RunConfig, manifest: Manifest, entry: VideoEntry
) -> VideoResult:
    loaded = _load_gt(manifest, entry)
    duration = loaded.gt.num_frames / entry.fps
    gt_segments = len(loaded.gt.segments())

    ignore_index = None
    if config.ignore_background is not None:
        action_list = manifest.actions[entry.activity]
        if config.ignore_background in action_list:
            ignore_index = action_list.index(config.ignore_background)

    try:
        pred, gt, solver = _segment_one(config, manifest, entry, loaded.gt)
        video_metrics = metrics.compute_video_metrics(
            pred, gt, ignore_index=ignore_index
        )
        error = None
    except Exception as exc:  # recorded (or re-raised) by the caller
        if not config.skip_failures:
            raise
        log.warning("video %s failed: %s", entry.id, exc)
        video_metrics, solver, error = None, None, str(exc)

    return VideoResult(
        id=entry.id,
        activity=entry.activity,
        fps=entry.fps,
        num_frames=loaded.gt.num_frames,
        duration_seconds=duration,
        gt_segment_count=gt_segments,
        video_metrics=video_metrics,
        solver=solver,
        error=error,
    )


def _selected_splits(manifest: Manifest, config: RunConfig) -> dict[str, tuple[str, ...]]:
    if manifest.splits:
        splits = dict(manifest.splits)
    else:
        splits = {"all": tuple(v.id for v in manifest.videos)}
    if config.split is not None:
        if config.split not in splits:
            raise ValueError(
                f"unknown split {config.split!r}; available: {sorted(splits)}"
            )
        splits = {config.split: splits[config.split]}
    return splits


def _metrics_doc(m: metrics.VideoMetrics | None) -> dict | None:
    return None if m is None else m.as_dict()


def _solver_doc(s: smts.SinkhornResult | None) -> dict | None:
    if s is None:
        return None
    return {
        "converged": s.converged,
        "iterations": s.iterations,
        "marginal_violation": s.marginal_violation,
    }


def run_eval(config: RunConfig) -> dict:
    """Evaluate one method over the selected split(s) of a manifest.

    Returns the results document; also writes it when the config names an
    output path. The document is complete iff no video failed.
    """
    manifest = dataset_io.load_manifest(config.manifest_path)
    splits = _selected_splits(manifest, config)
    video_ids = sorted({vid for members in splits.values() for vid in members})
    if not video_ids:
        raise ValueError("no videos in the selected split(s)")
    entries = [manifest.video(vid) for vid in video_ids]

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            results = list(
                pool.map(lambda e: _evaluate_video(config, manifest, e), entries)
            )
    else:
        results = [_evaluate_video(config, manifest, e) for e in entries]
    by_id = {r.id: r for r in results}

    videos_doc = [
        {
            "id": r.id,
            "activity": r.activity,
            "fps": r.fps,
            "num_frames": r.num_frames,
            "duration_seconds": r.duration_seconds,
            "gt_segment_count": r.gt_segment_count,
            "metrics": _metrics_doc(r.video_metrics),
            "solver": _solver_doc(r.solver),
            "error": r.error,
        }
        for r in results
    ]

    splits_doc: dict[str, dict] = {}
    split_aggregates: list[metrics.VideoMetrics] = []
    for name in sorted(splits):
        members = [by_id[vid] for vid in sorted(set(splits[name]))]
        scored = [r.video_metrics for r in members if r.video_metrics is not None]
        agg = metrics.aggregate(scored) if scored else None
        if agg is not None:
            split_aggregates.append(agg)
        splits_doc[name] = {
            "video_ids": [r.id for r in members],
            "num_videos": len(members),
            "num_scored": len(scored),
            "metrics": _metrics_doc(agg),
        }

    overall = metrics.aggregate(split_aggregates) if split_aggregates else None

    report = {
        "schema_version": 1,
        "dataset_name": manifest.dataset_name,
        "config": config.echo(),
        "videos": videos_doc,
        "splits": splits_doc,
        "overall": _metrics_doc(overall),
        "complete": all(r.error is None for r in results),
    }

    if config.bins is not None:
        dimension = (
            analysis.DURATION_SECONDS
            if config.bins == "duration"
            else analysis.GT_SEGMENT_COUNT
        )
        spec = bin_preset(manifest.dataset_name, dimension)
        per_video = [
            (
                r.id,
                {
                    analysis.DURATION_SECONDS: r.duration_seconds,
                    analysis.GT_SEGMENT_COUNT: float(r.gt_segment_count),
                },
                r.video_metrics,
            )
            for r in results
            if r.video_metrics is not None
        ]
        bins = analysis.binned_metrics(per_video, spec)
        report["binned"] = {
            config.bins: [
                {
                    "index": b.index,
                    "lo": b.lo,
                    "hi": b.hi,
                    "video_ids": list(b.video_ids),
                    "num_videos": len(b.video_ids),
                    "metrics": _metrics_doc(b.metrics),
                }
                for b in bins
            ]
        }

    if config.out_path is not None:
        dataset_io.write_results(report, config.out_path)
    return report


def run_stats(manifest: Manifest | str, split: str | None = None) -> dict:
    """Dataset statistics: video durations, segment counts, segment durations."""
    if not isinstance(manifest, Manifest):
        manifest = dataset_io.load_manifest(manifest)
    if split is not None:
        if split not in manifest.splits:
            raise ValueError(f"unknown split {split!r}")
        wanted = set(manifest.splits[split])
        entries = [v for v in manifest.videos if v.id in wanted]
    else:
        entries = list(manifest.videos)
    if not entries:
        raise ValueError("no videos")
    loaded = [_load_gt(manifest, entry) for entry in entries]

    def doc(stats: analysis.SummaryStats) -> dict:
        return {"min": stats.min, "max": stats.max, "mean": stats.mean}

    return {
        "dataset_name": manifest.dataset_name,
        "split": split,
        "num_videos": len(loaded),
        "video_duration_seconds": doc(analysis.video_duration_stats(loaded)),
        "gt_segments_per_video": doc(analysis.segment_count_stats(loaded)),
        "segment_duration_seconds": doc(analysis.segment_duration_stats(loaded)),
    }
