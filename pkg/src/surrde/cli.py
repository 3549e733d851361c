"""Command-line entry point for running experiments and emitting reports.

Verbs:
    run             execute the experiment matrix from an INI config
    shadow          execute the matrix with every run in shadow mode
    report          build report tables from an existing result store
    kriging-offline one-shot Kriging baseline on a single suite function
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .benchmarks import make_suite
from .core import RngStreams
from .experiment import (
    REPORT_KINDS,
    load_config,
    open_store,
    report,
    run_experiment,
    run_kriging_offline,
)


def _apply_overrides(cfg, args):
    updates = {}
    if args.output_dir is not None:
        updates["output_dir"] = args.output_dir
    if args.workers is not None:
        updates["workers"] = args.workers
    return dataclasses.replace(cfg, **updates) if updates else cfg


def _cmd_run(args, shadow: bool) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    if shadow:
        entries = tuple(dataclasses.replace(e, shadow=True) for e in cfg.entries)
        cfg = dataclasses.replace(cfg, entries=entries)
    store = run_experiment(cfg, skip_existing=args.skip_existing)
    done = sum(1 for s in store.manifest.values() if s == "done")
    print(f"runs done: {done}/{len(store.manifest)} -> {store.root}")
    for key in store.failures:
        print(f"failed: {key}", file=sys.stderr)
    return 0 if not store.failures else 1


def _cmd_report(args) -> int:
    store = open_store(args.store)
    for path in report(store, args.kind, args.output_dir or args.store):
        print(path)
    return 0


def _cmd_kriging_offline(args) -> int:
    suite = {s.id: s for s in make_suite(args.dimension, args.suite_seed)}
    if args.function not in suite:
        print(f"unknown function {args.function!r}", file=sys.stderr)
        return 1
    spec = suite[args.function]
    evaluator = lambda batch: [spec.evaluate(x) for x in batch]
    result = run_kriging_offline(
        spec.bounds, evaluator, budget=args.budget,
        streams=RngStreams(args.base_seed, 0),
        inner_allowance=args.inner_allowance,
    )
    print(f"lhs_best {result.lhs_best!r}")
    print(f"inner_best_predicted {result.inner_best_predicted!r}")
    print(f"final_true_fitness {result.final_true_fitness!r}")
    print(f"evaluations_used {result.evaluations_used}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="surrde",
        description="Surrogate-assisted differential evolution experiments.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    for verb in ("run", "shadow"):
        p = sub.add_parser(verb, help=f"{verb} the experiment matrix")
        p.add_argument("config", help="experiment INI file")
        p.add_argument("--output-dir", default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--skip-existing", action="store_true")

    p = sub.add_parser("report", help="emit report tables from a store")
    p.add_argument("store", help="result store directory")
    p.add_argument("kind", choices=REPORT_KINDS)
    p.add_argument("--output-dir", default=None)

    p = sub.add_parser("kriging-offline", help="offline Kriging baseline")
    p.add_argument("function", help="suite function id, e.g. F1")
    p.add_argument("--dimension", type=int, default=50)
    p.add_argument("--suite-seed", type=int, default=0)
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=750)
    p.add_argument("--inner-allowance", type=int, default=6000,
                   help="model-only evaluations for the inner search "
                        "(full-scale setting is 60000 per dimension)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.verb == "run":
        return _cmd_run(args, shadow=False)
    if args.verb == "shadow":
        return _cmd_run(args, shadow=True)
    if args.verb == "report":
        return _cmd_report(args)
    return _cmd_kriging_offline(args)


if __name__ == "__main__":
    raise SystemExit(main())
