"""Command line front end: solve one instance, generate instances, run suites.

Exit codes: 0 on success (solve requires a plan), 1 when a solve run ends
without a plan, 2 on bad input.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .domains import GENERATORS, InstanceSpec, generate
from .dsl import parse_problem, serialize_plan, serialize_problem, validate
from .harness import (
    AlgoSpec,
    best_of,
    build_mcts_config,
    build_search_config,
    compare_csv,
    coverage_csv,
    load_suite,
    read_records,
    run_suite,
    survival_csv,
)
from .search import run_mcts, run_search


def _add_algo_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--algo", choices=("sg", "sa", "mcts"), default="sg")
    parser.add_argument("--rect", choices=("lin", "qua", "log"), default="log")
    parser.add_argument("--sampler",
                        choices=("systematic", "uniform", "heuristic"),
                        default="uniform")
    parser.add_argument("--beta", type=float, default=1.0)
    parser.add_argument("--eps", type=float, default=1e-6)
    parser.add_argument("--cand", type=int, default=10,
                        help="candidate pool size for the heuristic sampler")
    parser.add_argument("--grid-digits", type=int, default=3,
                        help="decimal digits for control snapping; 0 disables")
    parser.add_argument("--reject-budget", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--time-limit", type=float, default=600.0)
    parser.add_argument("--expansion-limit", type=int, default=None)
    parser.add_argument("--dup-detect", choices=("on", "off"), default="on")
    parser.add_argument("--assert", dest="assertions",
                        choices=("on", "off"), default="off",
                        help="check search invariants while running")
    parser.add_argument("--alpha", type=float, default=0.3,
                        help="widening exponent (mcts)")
    parser.add_argument("--k", type=float, default=1.0,
                        help="widening scale (mcts)")
    parser.add_argument("--c", type=float, default=2.0 ** 0.5,
                        help="exploration constant (mcts)")
    parser.add_argument("--rollout-depth", type=int, default=50)


def _spec_from_args(args) -> AlgoSpec:
    return AlgoSpec(
        algo_id=args.algo, algo=args.algo, rectifier=args.rect,
        sampler=args.sampler, beta=args.beta, eps=args.eps,
        candidates=args.cand, grid_digits=args.grid_digits,
        reject_budget=args.reject_budget, dup_detect=args.dup_detect == "on",
        alpha=args.alpha, k=args.k, c=args.c,
        rollout_depth=args.rollout_depth,
    )


def _load_problem(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None
    problem, diags = parse_problem(text)
    if problem is not None:
        diags = validate(problem)
    errors = [d for d in diags if d.severity == "error"]
    for diag in diags:
        print(f"{path}: {diag}", file=sys.stderr)
    return None if errors else problem


def _cmd_solve(args) -> int:
    problem = _load_problem(args.file)
    if problem is None:
        return 2
    spec = _spec_from_args(args)
    if args.algo == "mcts":
        result = run_mcts(problem, build_mcts_config(
            spec, args.seed, args.time_limit, args.expansion_limit))
    else:
        cfg = build_search_config(spec, args.seed, args.time_limit,
                                  args.expansion_limit)
        cfg.assertions = args.assertions == "on"
        result = run_search(problem, cfg)
    print(f"outcome={result.outcome} expansions={result.expansions} "
          f"reexp_rate={result.reexpansion_rate:.4f} "
          f"time_s={result.time_s:.3f}", file=sys.stderr)
    if result.plan is None:
        return 1
    sys.stdout.write(serialize_plan(result.plan))
    return 0


def _cmd_gen(args) -> int:
    params = {}
    for item in args.param:
        key, sep, raw = item.partition("=")
        if not sep:
            print(f"error: expected key=value, got {item!r}", file=sys.stderr)
            return 2
        try:
            params[key] = int(raw)
        except ValueError:
            print(f"error: parameter {key!r} must be an integer",
                  file=sys.stderr)
            return 2
    spec = InstanceSpec(domain=args.domain, params=params, seed=args.seed)
    try:
        problem = generate(spec)
    except KeyError as exc:
        print(f"error: missing parameter {exc.args[0]!r} for {args.domain}",
              file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = serialize_problem(problem)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {spec.instance_id()} to {args.output}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_suite(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
        cfg = load_suite(text)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.workers is not None:
        cfg.workers = args.workers

    def progress(record):
        print(f"{record.instance} {record.algorithm} seed={record.seed} "
              f"-> {record.outcome}", file=sys.stderr)

    run_suite(cfg, out_dir=args.output, progress=progress)
    print(f"suite written to {args.output}", file=sys.stderr)
    return 0


def _cmd_report(args) -> int:
    try:
        records = read_records(f"{args.dir}/runs.csv")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.best_of:
        ids = args.best_of.split(",")
        try:
            records = list(records) + best_of(records, ids)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    try:
        if args.table:
            sys.stdout.write(coverage_csv(records, args.row, args.col))
        elif args.survival:
            sys.stdout.write(survival_csv(records))
        else:
            algo_a, algo_b = args.compare
            sys.stdout.write(compare_csv(records, algo_a, algo_b, args.metric))
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plan",
        description="Plan with continuous control variables.")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one problem file")
    solve.add_argument("file")
    _add_algo_flags(solve)
    solve.set_defaults(func=_cmd_solve)

    gen = sub.add_parser("gen", help="generate a benchmark instance")
    gen.add_argument("domain", choices=GENERATORS)
    gen.add_argument("-p", "--param", action="append", default=[],
                     metavar="KEY=VALUE",
                     help="integer size parameter; repeatable")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("-o", "--output", default=None)
    gen.set_defaults(func=_cmd_gen)

    suite = sub.add_parser("suite", help="run a benchmark suite")
    suite.add_argument("config")
    suite.add_argument("-o", "--output", required=True,
                       help="directory for runs.csv and meta.txt")
    suite.add_argument("--workers", type=int, default=None)
    suite.set_defaults(func=_cmd_suite)

    report = sub.add_parser("report", help="summarize a suite directory")
    report.add_argument("dir")
    what = report.add_mutually_exclusive_group(required=True)
    what.add_argument("--table", action="store_true",
                      help="coverage table, `solved (mean reexp rate)` cells")
    what.add_argument("--survival", action="store_true",
                      help="cumulative solved counts over wall time")
    what.add_argument("--compare", nargs=2, metavar=("A", "B"),
                      help="per-cell metric pairs on commonly solved cells")
    report.add_argument("--metric", default="plan_len",
                        choices=("plan_len", "expansions", "time_s"))
    report.add_argument("--best-of", default=None, metavar="IDS",
                        help="comma-separated algorithm ids to merge into "
                             "a virtual best:IDS algorithm")
    report.add_argument("--row", default="domain",
                        choices=("domain", "instance", "algorithm", "seed"))
    report.add_argument("--col", default="algorithm",
                        choices=("domain", "instance", "algorithm", "seed"))
    report.set_defaults(func=_cmd_report)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
