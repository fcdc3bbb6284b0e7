"""CLI: ``ovtas-extract extract`` and ``ovtas-extract extract-actions``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .encoders import ModelLoadError
from .frames import FrameDecodeError
from .jobs import ExtractJob, extract_actions, extract_video
from .registry import MODELS


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("OVTAS_LOG", "INFO").upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    parser = argparse.ArgumentParser(
        prog="ovtas-extract",
        description="Embed video frames and action labels into OVTE files "
        "consumable by the segmentation engine.",
        epilog=f"checkpoint models: {', '.join(sorted(MODELS))}; "
        "plus ref-<dim> deterministic reference encoders",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    video = sub.add_parser("extract", help="embed the frames of one clip")
    video.add_argument("--model", required=True, help="model id")
    video.add_argument("--video", required=True,
                       help="video file or directory of frame images")
    video.add_argument("--out", required=True, help="output directory")
    video.add_argument("--stride", type=int, default=1,
                       help="keep every k-th frame")
    video.add_argument("--fps", type=float, default=None,
                       help="source frame rate (required for frame directories)")
    video.add_argument("--activity", default="default")
    video.add_argument("--gt", default=None,
                       help="per-frame ground-truth file to record in the manifest")
    video.add_argument("--checkpoint-path", default=None,
                       help="local checkpoint override for hub models")

    actions = sub.add_parser("extract-actions", help="embed an action vocabulary")
    actions.add_argument("--model", required=True)
    actions.add_argument("--labels", required=True,
                         help="text file, one raw action label per line")
    actions.add_argument("--out", required=True)
    actions.add_argument("--activity", default="default")
    actions.add_argument("--dataset", default=None,
                         help="apply this dataset's label rewrite table (e.g. gtea)")
    actions.add_argument("--checkpoint-path", default=None)

    args = parser.parse_args(argv)
    try:
        if args.command == "extract":
            job = ExtractJob(
                source=Path(args.video),
                model_id=args.model,
                out_dir=Path(args.out),
                stride=args.stride,
                fps=args.fps,
                activity=args.activity,
                gt_path=Path(args.gt) if args.gt else None,
                checkpoint_path=args.checkpoint_path,
            )
            out_path = extract_video(job)
            print(out_path)
        else:
            labels_file = Path(args.labels)
            raw = [
                line.strip()
                for line in labels_file.read_text(encoding="utf-8").splitlines()
                if line.strip()
            ]
            out_path, phrases = extract_actions(
                raw,
                args.model,
                Path(args.out),
                activity=args.activity,
                dataset=args.dataset,
                checkpoint_path=args.checkpoint_path,
            )
            print(out_path)
            for phrase in phrases:
                print(f"  {phrase}")
    except (KeyError, ValueError, OSError, ModelLoadError, FrameDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
