"""Supported embedding models.

Fourteen off-the-shelf vision-language checkpoints across four families,
plus lightweight deterministic reference encoders (``ref-<dim>``) used for
tests and desk-scale experiments where no checkpoint download is possible.
Checkpoint-backed entries load lazily through the transformers bridge; the
listed width is the model's advertised joint-embedding size.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["ModelSpec", "MODELS", "resolve"]


@dataclass(frozen=True)
class ModelSpec:
    model_id: str
    family: str
    checkpoint: str
    dim: int
    params_m: float | None = None
    hf_ref: str | None = None

    @property
    def is_reference(self) -> bool:
        return self.family == "reference"


_CHECKPOINTS = [
    ModelSpec("siglip-m1", "SigLIP", "so400m-p16-256-i18n", 1152, 877.96,
              "google/siglip-so400m-patch16-256-i18n"),
    ModelSpec("siglip-m2", "SigLIP", "large-p16-384", 1024, 652.48,
              "google/siglip-large-patch16-384"),
    ModelSpec("siglip-m3", "SigLIP", "so400m-p14-384", 1152, 1128.76,
              "google/siglip-so400m-patch14-384"),
    ModelSpec("openclip-m1", "OpenCLIP", "ViT-B/32 (laion2B-s34B-b79K)", 512, 151.28,
              "laion/CLIP-ViT-B-32-laion2B-s34B-b79K"),
    ModelSpec("openclip-m2", "OpenCLIP", "ViT-B/16 (laion2B-s34B-b88K)", 512, 149.62,
              "laion/CLIP-ViT-B-16-laion2B-s34B-b88K"),
    ModelSpec("openclip-m3", "OpenCLIP", "ViT-L/14 (laion2B-s32B-b82K)", 768, 427.62,
              "laion/CLIP-ViT-L-14-laion2B-s32B-b82K"),
    ModelSpec("openclip-m4", "OpenCLIP", "ViT-H/14 (laion2B-s32B-b79K)", 1024, 986.11,
              "laion/CLIP-ViT-H-14-laion2B-s32B-b79K"),
    ModelSpec("openclip-m5", "OpenCLIP", "ViT-g/14 (laion2B-s34B-b88K)", 1024, 1366.68,
              "laion/CLIP-ViT-g-14-laion2B-s34B-b88K"),
    ModelSpec("clip-m1", "CLIP", "ViT-B/32", 512, 151.28,
              "openai/clip-vit-base-patch32"),
    ModelSpec("clip-m2", "CLIP", "ViT-B/16", 512, 149.62,
              "openai/clip-vit-base-patch16"),
    ModelSpec("clip-m3", "CLIP", "ViT-L/14", 768, 427.62,
              "openai/clip-vit-large-patch14"),
    ModelSpec("pecore-m1", "PECore", "B/16-224", 1024, 447.66,
              "facebook/PE-Core-B16-224"),
    ModelSpec("pecore-m2", "PECore", "L/14-336", 1024, 671.14,
              "facebook/PE-Core-L14-336"),
    ModelSpec("pecore-m3", "PECore", "G/14-448", 1280, 2419.27,
              "facebook/PE-Core-G14-448"),
]

MODELS: dict[str, ModelSpec] = {spec.model_id: spec for spec in _CHECKPOINTS}


def resolve(model_id: str) -> ModelSpec:
    """Look up a model id; ``ref-<dim>`` ids resolve to reference encoders."""
    key = model_id.strip().lower()
    if key in MODELS:
        return MODELS[key]
    if key.startswith("ref-"):
        try:
            dim = int(key.split("-", 1)[1])
        except ValueError:
            raise KeyError(f"bad reference model id {model_id!r}") from None
        if dim < 1:
            raise KeyError(f"bad reference model id {model_id!r}")
        return ModelSpec(key, "reference", f"hashed-projection-{dim}", dim)
    raise KeyError(
        f"unknown model id {model_id!r}; known: {sorted(MODELS)} or ref-<dim>"
    )
