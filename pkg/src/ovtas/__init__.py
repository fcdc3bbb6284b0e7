"""Training-free temporal action segmentation over precomputed embeddings.

Pipeline: frame/action cosine similarities (stage 1) are decoded into
temporally consistent per-frame labels by balanced entropic optimal
transport with a monotone temporal prior (stage 2). Ships the standard
evaluation suite (accuracy, segmental edit, overlap F1), four training-free
baselines, dataset statistics, and a manifest-driven CLI.
"""

from .config import RunConfig
from .core import (
    EmbeddingMatrix,
    FrameLabeling,
    ProbMatrix,
    Segment,
    SimilarityMatrix,
    TransportPlan,
    segments_of,
)
from .engine import run_eval, run_stats
from .metrics import VideoMetrics
from .smts import HyperParams

__version__ = "0.1.0"

__all__ = [
    "EmbeddingMatrix",
    "SimilarityMatrix",
    "ProbMatrix",
    "TransportPlan",
    "FrameLabeling",
    "Segment",
    "segments_of",
    "HyperParams",
    "VideoMetrics",
    "RunConfig",
    "run_eval",
    "run_stats",
    "__version__",
]
