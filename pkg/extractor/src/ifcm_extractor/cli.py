"""Command line front end.

    ifcm-extract run --images DIR --out DIR [--classes FILE]
                     [--backbone vgg16] [--layer conv5]
                     [--weights pretrained|random|PATH]
                     [--size 224] [--seed 0]
    ifcm-extract verify PACK [PACK ...]

Exit codes: 0 success, 1 verify found problems, 2 bad input or
configuration (no images, unloadable weights, malformed manifest).
"""

from __future__ import annotations

import argparse
import sys

from .backbone import ExtractorConfig
from .extract import ExtractionError, extract
from .packio import verify_pack


def cmd_run(args) -> int:
    try:
        config = ExtractorConfig(
            backbone=args.backbone,
            layer=args.layer,
            weights=args.weights,
            input_size=args.size,
            seed=args.seed,
        )
        written = extract(
            args.images, args.out, config=config, manifest_path=args.classes
        )
    except (ExtractionError, ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {len(written)} packs to {args.out}")
    return 0


def cmd_verify(args) -> int:
    bad = 0
    for path in args.packs:
        report = verify_pack(path)
        print(report)
        if not report.ok:
            bad += 1
    return 1 if bad else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ifcm-extract",
        description="CNN feature extraction into .ifp feature packs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="extract packs from an image directory")
    run.add_argument("--images", required=True, help="image directory root")
    run.add_argument("--out", required=True, help="output directory for packs")
    run.add_argument("--classes", help="class manifest (class_id,name lines)")
    run.add_argument("--backbone", default="vgg16")
    run.add_argument("--layer", default="conv5")
    run.add_argument(
        "--weights",
        default="pretrained",
        help="pretrained, random, or a state-dict path",
    )
    run.add_argument("--size", type=int, default=224, help="input crop size")
    run.add_argument("--seed", type=int, default=0, help="seed for random weights")
    run.set_defaults(func=cmd_run)

    verify = sub.add_parser("verify", help="check pack files for consistency")
    verify.add_argument("packs", nargs="+", help="pack files to inspect")
    verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
