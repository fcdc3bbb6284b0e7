"""Run configuration: defaults, reserved constants, and bin presets."""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

from .analysis import DURATION_SECONDS, GT_SEGMENT_COUNT, BinSpec
from .smts import HyperParams

__all__ = ["RunConfig", "METHODS", "ES_METHODS", "bin_preset"]

METHODS = (
    "ovtas",
    "stage2_ablation",
    "random_uniform",
    "es_mean",
    "es_vote",
    "es_nrp",
)
ES_METHODS = ("es_mean", "es_vote", "es_nrp")

# Constants published alongside epsilon for the referenced solver family.
# Only epsilon and the prior weight enter this engine's objective; the rest
# are echoed into results untouched so configs stay comparable.
RESERVED_ALPHA = 0.5
RESERVED_LAMBDA_FRAMES = 0.11
RESERVED_LAMBDA_ACTIONS = 0.01

# Duration-seconds and ground-truth-segment-count bin edges per dataset
# (last bin open-ended).
_DURATION_EDGES = {
    "gtea": (0.0, 60.0, 120.0),
    "breakfast": (0.0, 60.0, 120.0),
    "50salads": (240.0, 360.0, 480.0),
}
_SEGCOUNT_EDGES = {
    "gtea": (20.0, 30.0, 40.0),
    "breakfast": (0.0, 5.0, 10.0, 15.0),
    "50salads": (15.0, 20.0, 25.0),
}


def bin_preset(dataset_name: str, dimension: str) -> BinSpec:
    """Shipped bin edges for the three reference datasets."""
    key = dataset_name.strip().lower().replace(" ", "").replace("_", "")
    table = {
        DURATION_SECONDS: _DURATION_EDGES,
        GT_SEGMENT_COUNT: _SEGCOUNT_EDGES,
    }.get(dimension)
    if table is None:
        raise ValueError(f"unknown bin dimension {dimension!r}")
    if key not in table:
        raise ValueError(
            f"no {dimension} bin preset for dataset {dataset_name!r}; "
            f"known: {sorted(table)}"
        )
    return BinSpec(dimension=dimension, edges=table[key])


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines one evaluation run."""

    manifest_path: str
    method: str = "ovtas"
    split: str | None = None
    hp: HyperParams = field(default_factory=HyperParams)
    k_bins: int | None = None
    nrp_lambda: float = 0.05
    seed: int = 0
    skip_l2: bool = False
    ablate_prior: bool = False
    permute_stage1: bool = False
    ablate_stage2: bool = False
    ignore_background: str | None = None
    bins: str | None = None
    align_policy: str = "truncate"
    skip_failures: bool = False
    jobs: int = 1
    out_path: str | None = None
    # Reserved, unused solver-family constants (echoed into results only).
    alpha: float = RESERVED_ALPHA
    lambda_frames: float = RESERVED_LAMBDA_FRAMES
    lambda_actions: float = RESERVED_LAMBDA_ACTIONS

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        ablations = {
            "ablate_prior": self.ablate_prior,
            "skip_l2": self.skip_l2,
            "permute_stage1": self.permute_stage1,
            "ablate_stage2": self.ablate_stage2,
        }
        if self.method != "ovtas":
            active = [name for name, on in ablations.items() if on]
            if active:
                raise ValueError(
                    f"{active} only make sense with method 'ovtas', not {self.method!r}"
                )
        if self.k_bins is not None:
            if self.method not in ES_METHODS:
                raise ValueError("k_bins applies only to the equal-splits methods")
            if self.k_bins < 1:
                raise ValueError("k_bins must be >= 1")
        if self.nrp_lambda < 0:
            raise ValueError("nrp_lambda must be >= 0")
        if self.bins is not None and self.bins not in ("duration", "segcount"):
            raise ValueError("bins must be 'duration' or 'segcount'")
        if self.align_policy not in ("strict", "truncate"):
            raise ValueError("align_policy must be 'strict' or 'truncate'")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")

    def echo(self) -> dict:
        """JSON-ready view of the config, embedded in every results file."""
        doc = asdict(self)
        doc["hp"] = asdict(self.hp)
        return doc
