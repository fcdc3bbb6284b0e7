"""Extraction jobs: frames/labels in, OVTE files plus manifest out.

The emitted ``manifest.json`` follows the engine's schema (dataset name,
per-activity action lists, action embedding paths, video entries, splits).
Video entries without ground truth stay incomplete until annotations are
added; the engine refuses them with a clear error.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .encoders import Encoder, make_encoder
from .frames import load_frames, probe_video_fps
from .labels import normalize_labels
from .ovte import write_matrix
from .registry import resolve

__all__ = ["ExtractJob", "extract_video", "extract_actions", "update_manifest"]

log = logging.getLogger("ovtas_extractor")


@dataclass(frozen=True)
class ExtractJob:
    """One clip to embed: where the frames are and how to sample them."""

    source: Path
    model_id: str
    out_dir: Path
    stride: int = 1
    fps: float | None = None  # source rate; probed from video metadata if None
    activity: str = "default"
    gt_path: Path | None = None
    checkpoint_path: str | None = None

    @property
    def clip_id(self) -> str:
        return self.source.stem if self.source.suffix else self.source.name


def _effective_fps(job: ExtractJob) -> float:
    source_fps = job.fps if job.fps is not None else probe_video_fps(job.source)
    if source_fps is None or source_fps <= 0:
        raise ValueError(
            f"{job.source}: source fps unknown; pass it explicitly for frame "
            "directories"
        )
    return source_fps / job.stride


def _relative_to(path: Path, base: Path) -> str:
    try:
        return path.resolve().relative_to(base.resolve()).as_posix()
    except ValueError:
        return str(path.resolve())


def update_manifest(
    out_dir: Path,
    *,
    dataset_name: str | None = None,
    video_entry: dict | None = None,
    activity: str | None = None,
    actions: list[str] | None = None,
    action_emb_path: Path | None = None,
) -> Path:
    """Merge one extraction result into ``out_dir/manifest.json``."""
    manifest_path = out_dir / "manifest.json"
    if manifest_path.exists():
        doc = json.loads(manifest_path.read_text(encoding="utf-8"))
    else:
        doc = {
            "dataset_name": dataset_name or out_dir.name,
            "actions": {},
            "action_emb_path": {},
            "videos": [],
            "splits": {},
        }
    if dataset_name:
        doc["dataset_name"] = dataset_name
    if video_entry is not None:
        doc["videos"] = [v for v in doc["videos"] if v["id"] != video_entry["id"]]
        doc["videos"].append(video_entry)
        doc["videos"].sort(key=lambda v: v["id"])
    if activity is not None and actions is not None:
        doc["actions"][activity] = list(actions)
    if activity is not None and action_emb_path is not None:
        doc["action_emb_path"][activity] = _relative_to(action_emb_path, out_dir)
    manifest_path.write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest_path


def extract_video(job: ExtractJob, encoder: Encoder | None = None) -> Path:
    """Embed every sampled frame of one clip and register it in the manifest.

    Returns the OVTE path. Row order equals frame order; the matrix width is
    the model's embedding size.
    """
    spec = resolve(job.model_id)
    if encoder is None:
        encoder = make_encoder(spec, job.checkpoint_path)
    frames = load_frames(job.source, stride=job.stride)
    fps = _effective_fps(job)
    embeddings = np.asarray(encoder.encode_images(frames), dtype=np.float32)
    if embeddings.shape != (len(frames), spec.dim):
        raise RuntimeError(
            f"{spec.model_id} returned shape {embeddings.shape}, "
            f"expected ({len(frames)}, {spec.dim})"
        )

    job.out_dir.mkdir(parents=True, exist_ok=True)
    out_path = job.out_dir / f"{job.clip_id}.{spec.model_id}.ovte"
    write_matrix(embeddings, out_path)
    log.info("wrote %s: %d frames x %d dims", out_path, *embeddings.shape)

    entry = {
        "id": job.clip_id,
        "activity": job.activity,
        "fps": fps,
        "frames_emb_path": _relative_to(out_path, job.out_dir),
    }
    if job.gt_path is not None:
        entry["gt_path"] = _relative_to(job.gt_path, job.out_dir)
    update_manifest(job.out_dir, video_entry=entry)
    return out_path


def extract_actions(
    raw_labels: list[str],
    model_id: str,
    out_dir: Path,
    *,
    activity: str = "default",
    dataset: str | None = None,
    encoder: Encoder | None = None,
    checkpoint_path: str | None = None,
) -> tuple[Path, list[str]]:
    """Embed an action vocabulary; row order equals the returned label order."""
    spec = resolve(model_id)
    if encoder is None:
        encoder = make_encoder(spec, checkpoint_path)
    phrases = normalize_labels(raw_labels, dataset=dataset)
    embeddings = np.asarray(encoder.encode_texts(phrases), dtype=np.float32)
    if embeddings.shape != (len(phrases), spec.dim):
        raise RuntimeError(
            f"{spec.model_id} returned shape {embeddings.shape}, "
            f"expected ({len(phrases)}, {spec.dim})"
        )

    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{activity}.actions.{spec.model_id}.ovte"
    write_matrix(embeddings, out_path)
    labels_path = out_dir / f"{activity}.actions.json"
    labels_path.write_text(
        json.dumps(phrases, indent=2) + "\n", encoding="utf-8"
    )
    update_manifest(
        out_dir, activity=activity, actions=phrases, action_emb_path=out_path
    )
    return out_path, phrases
