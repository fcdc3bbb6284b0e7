"""Embedding extractor for the segmentation engine.

Turns video frames and action-label text into the engine's OVTE embedding
files and keeps a dataset manifest up to date. Real vision-language
checkpoints load through the optional transformers bridge; deterministic
reference encoders (``ref-<dim>``) cover tests and dry runs.
"""

from .encoders import HFVlmEncoder, ModelLoadError, ReferenceEncoder, make_encoder
from .jobs import ExtractJob, extract_actions, extract_video
from .labels import normalize_label, normalize_labels
from .registry import MODELS, ModelSpec, resolve

__version__ = "0.1.0"

__all__ = [
    "ExtractJob",
    "extract_video",
    "extract_actions",
    "normalize_label",
    "normalize_labels",
    "MODELS",
    "ModelSpec",
    "resolve",
    "make_encoder",
    "ReferenceEncoder",
    "HFVlmEncoder",
    "ModelLoadError",
    "__version__",
]
