"""Encoder backends behind one small interface.

``ReferenceEncoder`` is a dependency-free deterministic stand-in: images are
block-averaged to a fixed mosaic and text to hashed character trigrams, each
pushed through a projection matrix seeded from the model id. It produces
stable, reproducible embeddings with the right shapes, which is all the
pipeline plumbing and tests need.

``HFVlmEncoder`` bridges to real checkpoints through transformers when the
optional ``models`` extra (and the weights) are available.
"""

from __future__ import annotations

import hashlib
from typing import Protocol, Sequence

import numpy as np
from PIL import Image

from .registry import ModelSpec

__all__ = [
    "Encoder",
    "ModelLoadError",
    "ReferenceEncoder",
    "HFVlmEncoder",
    "make_encoder",
    "l2_normalize",
]


def l2_normalize(matrix: np.ndarray) -> np.ndarray:
    """Unit-normalize rows; embeddings are written raw, consumers normalize."""
    return matrix / np.linalg.norm(matrix, axis=1, keepdims=True)


class ModelLoadError(RuntimeError):
    pass


class Encoder(Protocol):
    spec: ModelSpec

    def encode_images(self, images: Sequence[Image.Image]) -> np.ndarray: ...

    def encode_texts(self, phrases: Sequence[str]) -> np.ndarray: ...


def _seed_from(tag: str) -> np.random.Generator:
    digest = hashlib.sha256(tag.encode()).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "little"))


class ReferenceEncoder:
    """Deterministic feature hashing, no learned weights."""

    _MOSAIC = 16  # images are reduced to MOSAIC x MOSAIC x 3 block means
    _TEXT_BUCKETS = 512

    def __init__(self, spec: ModelSpec):
        self.spec = spec
        image_rng = _seed_from(f"{spec.model_id}:image")
        text_rng = _seed_from(f"{spec.model_id}:text")
        mosaic_dims = self._MOSAIC * self._MOSAIC * 3
        self._image_proj = image_rng.normal(
            size=(mosaic_dims, spec.dim)
        ).astype(np.float32)
        self._text_proj = text_rng.normal(
            size=(self._TEXT_BUCKETS, spec.dim)
        ).astype(np.float32)

    def encode_images(self, images) -> np.ndarray:
        rows = np.stack([self._mosaic(img) for img in images])
        return rows @ self._image_proj

    def encode_texts(self, phrases) -> np.ndarray:
        rows = np.stack([self._trigram_counts(p) for p in phrases])
        return rows @ self._text_proj

    def _mosaic(self, image: Image.Image) -> np.ndarray:
        small = image.convert("RGB").resize(
            (self._MOSAIC, self._MOSAIC), resample=Image.BILINEAR
        )
        values = np.asarray(small, dtype=np.float32) / 255.0
        return values.reshape(-1)

    def _trigram_counts(self, phrase: str) -> np.ndarray:
        counts = np.zeros(self._TEXT_BUCKETS, dtype=np.float32)
        padded = f"  {phrase.lower()}  "
        for i in range(len(padded) - 2):
            gram = padded[i : i + 3].encode()
            bucket = int.from_bytes(hashlib.sha256(gram).digest()[:4], "little")
            counts[bucket % self._TEXT_BUCKETS] += 1.0
        total = counts.sum()
        return counts / total if total else counts


class HFVlmEncoder:
    """Checkpoint-backed encoder via transformers (optional dependency)."""

    def __init__(self, spec: ModelSpec, checkpoint_path: str | None = None):
        self.spec = spec
        ref = checkpoint_path or spec.hf_ref
        if ref is None:
            raise ModelLoadError(f"{spec.model_id} has no checkpoint reference")
        try:
            import torch
            from transformers import AutoModel, AutoProcessor
        except ImportError as exc:
            raise ModelLoadError(
                f"transformers/torch unavailable, cannot load {spec.model_id}: {exc}"
            ) from exc
        try:
            self._model = AutoModel.from_pretrained(ref)
            self._processor = AutoProcessor.from_pretrained(ref)
        except Exception as exc:
            raise ModelLoadError(f"cannot load checkpoint {ref!r}: {exc}") from exc
        self._torch = torch
        self._model.eval()

    def encode_images(self, images) -> np.ndarray:
        with self._torch.no_grad():
            inputs = self._processor(images=list(images), return_tensors="pt")
            features = self._model.get_image_features(**inputs)
        return features.float().cpu().numpy()

    def encode_texts(self, phrases) -> np.ndarray:
        with self._torch.no_grad():
            inputs = self._processor(
                text=list(phrases), return_tensors="pt", padding=True
            )
            features = self._model.get_text_features(**inputs)
        return features.float().cpu().numpy()


def make_encoder(spec: ModelSpec, checkpoint_path: str | None = None) -> Encoder:
    if spec.is_reference:
        return ReferenceEncoder(spec)
    return HFVlmEncoder(spec, checkpoint_path)
