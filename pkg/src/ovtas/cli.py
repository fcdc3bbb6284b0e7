"""Command-line entry points: ``ovtas eval`` and ``ovtas stats``.

Log verbosity is controlled by the ``OVTAS_LOG`` environment variable
(standard level names, default WARNING); all randomness flows from
``--seed``.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .config import METHODS, RunConfig
from .engine import run_eval, run_stats
from .smts import HyperParams


def _setup_logging() -> None:
    level_name = os.environ.get("OVTAS_LOG", "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(
        level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )


def _add_eval_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--manifest", required=True, help="dataset manifest JSON")
    parser.add_argument("--split", default=None, help="evaluate one named split")
    parser.add_argument("--method", default="ovtas", choices=METHODS)
    parser.add_argument("--epsilon", type=float, default=0.07,
                        help="entropy weight of the transport solver")
    parser.add_argument("--rho", type=float, default=0.04,
                        help="temporal prior weight")
    parser.add_argument("--max-iters", type=int, default=1000)
    parser.add_argument("--tol", type=float, default=1e-6,
                        help="marginal feasibility tolerance")
    parser.add_argument("--k-bins", type=int, default=None,
                        help="equal-splits bin count (default: action-set size)")
    parser.add_argument("--lambda", dest="nrp_lambda", type=float, default=0.05,
                        help="non-repetition penalty for es_nrp")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--ablate-prior", action="store_true",
                        help="zero the temporal prior in the solver")
    parser.add_argument("--ablate-l2", action="store_true",
                        help="skip row normalization before similarities")
    parser.add_argument("--ablate-stage1", action="store_true",
                        help="permute frame and action embedding rows")
    parser.add_argument("--ablate-stage2", action="store_true",
                        help="per-frame argmax instead of the transport solver")
    parser.add_argument("--ignore-background", default=None, metavar="LABEL",
                        help="exclude this class from scoring")
    parser.add_argument("--bins", default=None, choices=("duration", "segcount"),
                        help="emit a binned metrics table using dataset presets")
    parser.add_argument("--out", default=None, help="results file path")
    parser.add_argument("--skip-failures", action="store_true",
                        help="record per-video failures instead of aborting")
    parser.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                        help="videos processed in parallel")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        manifest_path=args.manifest,
        method=args.method,
        split=args.split,
        hp=HyperParams(
            epsilon=args.epsilon,
            rho=args.rho,
            max_iters=args.max_iters,
            tol=args.tol,
        ),
        k_bins=args.k_bins,
        nrp_lambda=args.nrp_lambda,
        seed=args.seed,
        skip_l2=args.ablate_l2,
        ablate_prior=args.ablate_prior,
        permute_stage1=args.ablate_stage1,
        ablate_stage2=args.ablate_stage2,
        ignore_background=args.ignore_background,
        bins=args.bins,
        skip_failures=args.skip_failures,
        jobs=args.jobs,
        out_path=args.out,
    )


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = argparse.ArgumentParser(
        prog="ovtas",
        description="Training-free temporal action segmentation over "
        "precomputed frame and action-label embeddings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    eval_parser = sub.add_parser("eval", help="run one method over a manifest")
    _add_eval_args(eval_parser)

    stats_parser = sub.add_parser("stats", help="dataset statistics tables")
    stats_parser.add_argument("--manifest", required=True)
    stats_parser.add_argument("--split", default=None)
    stats_parser.add_argument("--out", default=None)

    args = parser.parse_args(argv)

    if args.command == "eval":
        try:
            config = _config_from_args(args)
            report = run_eval(config)
        except (ValueError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        if args.out is None:
            print(json.dumps(report, indent=2, sort_keys=True))
        else:
            print(f"results written to {args.out}")
        return 0 if report["complete"] else 1

    if args.command == "stats":
        try:
            tables = run_stats(args.manifest, split=args.split)
        except (ValueError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        text = json.dumps(tables, indent=2, sort_keys=True)
        if args.out is None:
            print(text)
        else:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
            print(f"statistics written to {args.out}")
        return 0

    return 2


if __name__ == "__main__":
    sys.exit(main())
