"""Command-line interface.

Commands: train, classify, inspect, gridsearch, trace (classify with a
mandatory trace file). Exit codes: 0 success, 2 unusable input data,
3 training failure, 4 model/input mismatch at inference, 5 corrupt model
file. The IFCM_SEED environment variable overrides any other seed source
for experiments.
"""
from __future__ import annotations

import argparse
import os
import sys

from .inference import DimensionMismatchError, classify, explain, trace_export
from .store import (
    PackFormatError,
    ModelFormatError,
    load_model,
    read_class_manifest,
    read_pack,
    save_model,
)
from .training import TrainingConfig, TrainingDataError, grid_search, train

EXIT_OK = 0
EXIT_DATA = 2
EXIT_TRAINING = 3
EXIT_MISMATCH = 4
EXIT_MODEL = 5


def _load_pack_dir(path: str):
    if not os.path.isdir(path):
        raise PackFormatError(f"{path}: not a directory")
    names = sorted(n for n in os.listdir(path) if n.endswith(".ifp"))
    if not names:
        raise PackFormatError(f"{path}: no .ifp packs found")
    return [read_pack(os.path.join(path, n)) for n in names]


def _effective_seed(flag_seed: int) -> int:
    env = os.environ.get("IFCM_SEED")
    if env is None:
        return flag_seed
    try:
        return int(env)
    except ValueError:
        raise PackFormatError(f"IFCM_SEED={env!r} is not an integer")


def _config_from_flags(args) -> TrainingConfig:
    return TrainingConfig(
        clusters_per_class=args.clusters, e_b=args.sets, e_q=args.sets,
        mf_shape=args.mf, superpixels=args.superpixels,
        compactness=args.compactness, levels=args.levels,
        seed=_effective_seed(args.seed), transfer=args.transfer,
        lam=args.lam, epsilon=args.epsilon, max_iters=args.max_iters)


def cmd_train(args) -> int:
    packs = _load_pack_dir(args.data)
    classes = (read_class_manifest(args.classes)
               if args.classes else None)
    cfg = _config_from_flags(args)
    model = train(packs, cfg, classes=classes)
    save_model(model, args.out)
    print(f"model: {model.n_concepts} concepts "
          f"({model.n_inputs} parts, {model.n_outputs} classes)")
    print("pairs per part concept:")
    for idx, medoid in enumerate(model.medoids):
        print(f"  {idx} {medoid.concept_label}: {len(model.pair_sets[idx])}")
    diag = ", ".join(f"{k}={v}" for k, v in sorted(model.diagnostics.items()))
    print(f"diagnostics: {diag if diag else 'none'}")
    print(f"saved: {args.out}")
    return EXIT_OK


def _print_decision(model, decision) -> None:
    names = {c.class_id: c.name for c in model.classes}
    print(f"class {decision.class_id} ({names[decision.class_id]})")
    for cid, score in decision.scores.items():
        print(f"  class {cid} ({names[cid]}): mu={score.value.mu:.9g} "
              f"gamma={score.value.gamma:.9g} hesitancy={score.hesitancy:.9g}")
    print(f"iterations: {decision.iterations} "
          f"converged: {'yes' if decision.converged else 'no'}")


def cmd_classify(args) -> int:
    model = load_model(args.model)
    pack = read_pack(args.input)
    decision = classify(model, pack)
    _print_decision(model, decision)
    if args.explain:
        print(explain(decision, model).render())
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(trace_export(decision))
        print(f"trace: {args.trace}")
    return EXIT_OK


def cmd_inspect(args) -> int:
    model = load_model(args.model)
    print(f"model: {model.n_concepts} concepts "
          f"({model.n_inputs} parts, {model.n_outputs} classes)")
    print("concepts:")
    for idx, medoid in enumerate(model.medoids):
        print(f"  {idx} part {medoid.concept_label} "
              f"(class {medoid.class_id}, {len(model.pair_sets[idx])} pairs)")
    for pos, spec in enumerate(model.classes):
        print(f"  {model.n_inputs + pos} class {spec.name} "
              f"(class {spec.class_id})")
    print("edges:")
    for e in model.edges:
        label = "neutral" if e.neutral else model.partition.term(e.weight.mu)
        sign = "+" if e.polarity > 0 else "-"
        print(f"  {e.src} -> {e.dst} [{e.kind} {sign}] "
              f"<{e.weight.mu:.9g}, {e.weight.gamma:.9g}> {label}")
    diag = ", ".join(f"{k}={v}" for k, v in sorted(model.diagnostics.items()))
    print(f"diagnostics: {diag if diag else 'none'}")
    return EXIT_OK


def cmd_gridsearch(args) -> int:
    packs = _load_pack_dir(args.data)
    base = _config_from_flags(args)
    scores: list = []
    winner = grid_search(packs, args.cluster_candidates, args.set_candidates,
                         folds=args.folds, cfg=base, scores_out=scores)
    scores.sort(key=lambda row: (-row[2], row[0], row[1]))
    lines = [f"winner: clusters={winner.clusters_per_class} "
             f"sets={winner.e_b}",
             "clusters,sets,accuracy"]
    lines += [f"{c},{s},{a:.6f}" for c, s, a in scores]
    text = "\n".join(lines) + "\n"
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(text, end="")
    print(f"saved: {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ifcm",
        description="Image classification with fuzzy cognitive maps over "
                    "region features.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_flags(p):
        p.add_argument("--clusters", type=int, default=2,
                       help="part concepts per class (default 2)")
        p.add_argument("--sets", type=int, default=5,
                       help="fuzzy sets per evidence family (default 5)")
        p.add_argument("--mf", default="gaussian",
                       choices=("gaussian", "triangular"),
                       help="membership function shape (default gaussian)")
        p.add_argument("--superpixels", type=int, default=16,
                       help="target regions for raster packs (default 16)")
        p.add_argument("--compactness", type=float, default=10.0)
        p.add_argument("--levels", type=int, default=5, choices=(3, 5, 7),
                       help="linguistic partition size (default 5)")
        p.add_argument("--seed", type=int, default=0,
                       help="clustering seed (IFCM_SEED overrides)")
        p.add_argument("--transfer", default="tanh",
                       choices=("tanh", "sigmoid", "identity"))
        p.add_argument("--lam", type=float, default=1.0,
                       help="sigmoid steepness")
        p.add_argument("--epsilon", type=float, default=1e-5,
                       help="reasoning convergence threshold")
        p.add_argument("--max-iters", type=int, default=100)

    p = sub.add_parser("train", help="build a model from a pack directory")
    p.add_argument("--data", required=True, help="directory of .ifp packs")
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--classes", help="class manifest (class_id,name lines)")
    add_config_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="classify one feature pack")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True, help="feature pack to classify")
    p.add_argument("--explain", action="store_true",
                   help="print the linguistic explanation")
    p.add_argument("--trace", help="write the reasoning trajectory CSV here")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("inspect", help="print a model's structure")
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("gridsearch",
                       help="pick clusters/sets by cross-validation")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help="report file to write")
    p.add_argument("--cluster-candidates", type=int, nargs="+",
                   default=[2, 3], metavar="N")
    p.add_argument("--set-candidates", type=int, nargs="+",
                   default=[4, 5], metavar="E")
    p.add_argument("--folds", type=int, default=3)
    add_config_flags(p)
    p.set_defaults(func=cmd_gridsearch)

    p = sub.add_parser("trace",
                       help="classify and always write the trajectory CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True, dest="trace",
                   help="trajectory CSV path")
    p.add_argument("--explain", action="store_true")
    p.set_defaults(func=cmd_classify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ModelFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except DimensionMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except PackFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except TrainingDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRAINING
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRAINING
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
