"""File formats: embedding tensors, ground-truth labels, manifests, results.

Embedding files ("OVTE") are a minimal binary container: magic ``OVTE``,
uint32 LE version (=1), uint64 LE rows and cols, then rows*cols float32 LE
values in row-major order. Ground truth is the community-standard per-frame
text format (one action name per line). Manifests and results are JSON with
stable key ordering so identical runs diff clean.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import EmbeddingMatrix, FrameLabeling

__all__ = [
    "EmbeddingFormatError",
    "BadMagicError",
    "TruncatedPayloadError",
    "NonFinitePayloadError",
    "ManifestError",
    "VideoEntry",
    "Manifest",
    "read_emb",
    "write_emb",
    "read_gt",
    "align_lengths",
    "load_manifest",
    "write_results",
    "read_results",
]

OVTE_MAGIC = b"OVTE"
OVTE_VERSION = 1
_HEADER = struct.Struct("<4sIQQ")


class EmbeddingFormatError(ValueError):
    """Base class for malformed embedding files."""


class BadMagicError(EmbeddingFormatError):
    pass


class TruncatedPayloadError(EmbeddingFormatError):
    pass


class NonFinitePayloadError(EmbeddingFormatError):
    pass


class ManifestError(ValueError):
    pass


def write_emb(matrix: EmbeddingMatrix, path: str | Path) -> None:
    """Write an embedding matrix in the OVTE binary format."""
    path = Path(path)
    payload = np.ascontiguousarray(matrix.data, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(OVTE_MAGIC, OVTE_VERSION, matrix.rows, matrix.cols))
        fh.write(payload.tobytes())


def read_emb(path: str | Path) -> EmbeddingMatrix:
    """Read an OVTE embedding file, verifying magic, size, and finiteness."""
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise TruncatedPayloadError(f"{path}: file shorter than the header")
    magic, version, rows, cols = _HEADER.unpack_from(raw)
    if magic != OVTE_MAGIC:
        raise BadMagicError(f"{path}: bad magic {magic!r}")
    if version != OVTE_VERSION:
        raise EmbeddingFormatError(f"{path}: unsupported version {version}")
    if rows < 1 or cols < 1:
        raise EmbeddingFormatError(f"{path}: invalid shape {rows}x{cols}")
    expected = rows * cols * 4
    payload = raw[_HEADER.size :]
    if len(payload) != expected:
        raise TruncatedPayloadError(
            f"{path}: payload has {len(payload)} bytes, header promises {expected}"
        )
    values = np.frombuffer(payload, dtype="<f4").reshape(rows, cols)
    if not np.isfinite(values).all():
        raise NonFinitePayloadError(f"{path}: payload contains NaN or Inf")
    return EmbeddingMatrix(values.astype(np.float64))


def read_gt(path: str | Path, action_list: list[str] | tuple[str, ...]) -> FrameLabeling:
    """Read per-frame ground truth: one action name per line, LF or CRLF.

    Labels are mapped to indices by position in ``action_list``. Trailing
    blank lines are ignored; blank or unknown labels elsewhere are errors
    that report the offending line number.
    """
    path = Path(path)
    index = {name: i for i, name in enumerate(action_list)}
    lines = path.read_text(encoding="utf-8").split("\n")
    while lines and lines[-1].strip() == "":
        lines.pop()
    if not lines:
        raise ValueError(f"{path}: empty ground-truth file")
    labels = np.empty(len(lines), dtype=np.int64)
    for lineno, line in enumerate(lines, start=1):
        name = line.strip()
        if name not in index:
            raise ValueError(f"{path}: unknown label {name!r} on line {lineno}")
        labels[lineno - 1] = index[name]
    return FrameLabeling(
        labels=labels, num_actions=len(action_list), label_names=tuple(action_list)
    )


def align_lengths(
    emb_frames: int, gt_frames: int, policy: str = "truncate"
) -> int:
    """Reconcile embedding and ground-truth frame counts.

    ``strict`` errors on any mismatch. ``truncate`` uses the shorter length
    when the difference is at most 2 frames (off-by-one counts are endemic
    in this kind of data) and errors beyond that.
    """
    if emb_frames < 1 or gt_frames < 1:
        raise ValueError("frame counts must be >= 1")
    if policy == "strict":
        if emb_frames != gt_frames:
            raise ValueError(
                f"frame count mismatch: embeddings {emb_frames} vs gt {gt_frames}"
            )
        return emb_frames
    if policy == "truncate":
        if abs(emb_frames - gt_frames) > 2:
            raise ValueError(
                f"frame count mismatch beyond tolerance: embeddings {emb_frames} "
                f"vs gt {gt_frames}"
            )
        return min(emb_frames, gt_frames)
    raise ValueError(f"unknown alignment policy {policy!r}")


@dataclass(frozen=True)
class VideoEntry:
    id: str
    activity: str
    fps: float
    gt_path: Path
    frames_emb_path: Path | None = None


@dataclass(frozen=True)
class Manifest:
    """Dataset description: videos, per-activity action sets, splits."""

    dataset_name: str
    videos: tuple[VideoEntry, ...]
    actions: dict[str, tuple[str, ...]] = field(default_factory=dict)
    action_emb_path: dict[str, Path] = field(default_factory=dict)
    splits: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def video(self, video_id: str) -> VideoEntry:
        for entry in self.videos:
            if entry.id == video_id:
                return entry
        raise KeyError(video_id)

    def split_names(self) -> list[str]:
        return sorted(self.splits)


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ManifestError(f"{context}: missing required field {key!r}")
    return mapping[key]


def load_manifest(path: str | Path, *, validate: bool = True) -> Manifest:
    """Load and validate a manifest JSON file.

    Relative paths are resolved against the manifest's directory. Validation
    checks that referenced files exist, that every split id names a video,
    that each video's activity has an action list, and (when an action
    embedding file is declared) that its row count matches the action list.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: not valid JSON ({exc})") from exc
    base = path.parent

    dataset_name = _require(doc, "dataset_name", str(path))
    actions = {
        activity: tuple(labels)
        for activity, labels in _require(doc, "actions", str(path)).items()
    }
    action_emb_path = {
        activity: (base / p) for activity, p in doc.get("action_emb_path", {}).items()
    }

    videos = []
    seen_ids: set[str] = set()
    for i, entry in enumerate(_require(doc, "videos", str(path))):
        context = f"{path}: videos[{i}]"
        video_id = str(_require(entry, "id", context))
        if video_id in seen_ids:
            raise ManifestError(f"{context}: duplicate video id {video_id!r}")
        seen_ids.add(video_id)
        activity = str(_require(entry, "activity", context))
        fps = float(_require(entry, "fps", context))
        if fps <= 0:
            raise ManifestError(f"{context}: fps must be positive")
        gt_path = base / _require(entry, "gt_path", context)
        frames_emb = entry.get("frames_emb_path")
        videos.append(
            VideoEntry(
                id=video_id,
                activity=activity,
                fps=fps,
                gt_path=gt_path,
                frames_emb_path=(base / frames_emb) if frames_emb else None,
            )
        )

    splits = {
        name: tuple(str(v) for v in ids) for name, ids in doc.get("splits", {}).items()
    }

    manifest = Manifest(
        dataset_name=str(dataset_name),
        videos=tuple(videos),
        actions=actions,
        action_emb_path=action_emb_path,
        splits=splits,
    )
    if validate:
        _validate_manifest(manifest, path)
    return manifest


def _validate_manifest(manifest: Manifest, path: Path) -> None:
    ids = {v.id for v in manifest.videos}
    for name, members in manifest.splits.items():
        unknown = [v for v in members if v not in ids]
        if unknown:
            raise ManifestError(f"{path}: split {name!r} references unknown videos {unknown}")
    for video in manifest.videos:
        if video.activity not in manifest.actions:
            raise ManifestError(
                f"{path}: video {video.id!r} has activity {video.activity!r} "
                "with no action list"
            )
        if not video.gt_path.exists():
            raise ManifestError(f"{path}: missing ground truth {video.gt_path}")
        if video.frames_emb_path is not None and not video.frames_emb_path.exists():
            raise ManifestError(f"{path}: missing embeddings {video.frames_emb_path}")
        try:
            read_gt(video.gt_path, manifest.actions[video.activity])
        except ValueError as exc:
            raise ManifestError(f"{path}: video {video.id!r}: {exc}") from exc
    for activity, emb_path in manifest.action_emb_path.items():
        if not emb_path.exists():
            raise ManifestError(f"{path}: missing action embeddings {emb_path}")
        if activity not in manifest.actions:
            raise ManifestError(
                f"{path}: action embeddings declared for unknown activity {activity!r}"
            )
        matrix = read_emb(emb_path)
        expected = len(manifest.actions[activity])
        if matrix.rows != expected:
            raise ManifestError(
                f"{path}: activity {activity!r} lists {expected} actions but "
                f"{emb_path} holds {matrix.rows} rows"
            )


def write_results(report: dict, path: str | Path) -> None:
    """Serialize a results document deterministically (sorted keys, LF)."""
    path = Path(path)
    text = json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False)
    path.write_text(text + "\n", encoding="utf-8")


def read_results(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
