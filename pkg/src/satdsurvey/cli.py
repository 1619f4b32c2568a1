"""Command-line entry points: dataset generation/inspection, the
experiment rig, and the labeling service."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path


def _cmd_make_data(args) -> int:
    from .datagen import write_benchmark

    paths = write_benchmark(args.out, seed=args.seed)
    print(f"wrote {len(paths)} project files to {args.out}")
    return 0


def _cmd_load(args) -> int:
    from .harness import load_benchmark

    corpora = load_benchmark(args.data, fmt=args.format)
    total_c = total_s = 0
    print(f"{'project':<12} {'comments':>9} {'debt':>6} {'prev%':>6}")
    for corp in corpora:
        pos = corp.positives()
        total_c += len(corp)
        total_s += pos
        print(f"{corp.name:<12} {len(corp):>9} {pos:>6} {100 * corp.prevalence():>6.2f}")
    print(f"{'TOTAL':<12} {total_c:>9} {total_s:>6}")
    return 0


def _cmd_rig(args) -> int:
    from .harness import RigConfig, classify_only_table, emit_report, load_benchmark, run_standard_rig

    corpora = load_benchmark(args.data, fmt=args.format)
    config = RigConfig(
        classifier=args.classifier,
        rules=tuple(args.stop),
        repeats=args.repeats,
        m=args.m,
        master_seed=args.seed,
        jobs=args.jobs,
        cap_fraction=args.cap,
    )
    result = run_standard_rig(corpora, config)
    classify = None
    if args.classify_only:
        classify = classify_only_table(
            corpora, repeats=args.classify_repeats, master_seed=args.seed, jobs=args.jobs
        )
    emit_report(result, args.out, classify=classify)
    for rule in result.rules():
        mr, ir = result.overall(rule, "recall")
        mc, ic = result.overall(rule, "cost")
        print(f"{rule}: median recall {mr:.1f} (IQR {ir:.1f}), median cost {mc:.1f} (IQR {ic:.1f})")
    print(f"report written to {args.out}")
    return 0


def _cmd_serve(args) -> int:
    from .service import serve

    serve(args.data, port=args.port, fmt=args.format, log_dir=args.log_dir, ui_dir=args.ui_dir)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="satdsurvey")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("make-data", help="generate the synthetic benchmark corpus")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=_cmd_make_data)

    p = sub.add_parser("load", help="discover and summarize a dataset directory")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--format", default="default")
    p.set_defaults(func=_cmd_load)

    p = sub.add_parser("rig", help="run the leave-one-project-out survey rig")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--classifier", choices=["svm", "ensemble"], default="svm")
    p.add_argument(
        "--stop",
        action="append",
        default=None,
        help="stopping rule (repeatable): target@0.9 | ros:10 | cormack:12",
    )
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--cap", type=float, default=1.0, help="observer read cap as corpus fraction")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--format", default="default")
    p.add_argument("--classify-only", action="store_true", help="also run the no-survey baseline")
    p.add_argument("--classify-repeats", type=int, default=3)
    p.set_defaults(func=_cmd_rig)

    p = sub.add_parser("serve", help="serve the labeling API (and UI if built)")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--port", type=int, default=int(os.environ.get("SATDSURVEY_PORT", "8714")))
    p.add_argument("--format", default="default")
    p.add_argument("--log-dir", type=Path, default=None)
    p.add_argument("--ui-dir", type=Path, default=None)
    p.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "rig" and args.stop is None:
        args.stop = ["target@0.9"]
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
