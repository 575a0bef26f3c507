"""Command-line interface.

Subcommands: synth (plan one instance), bench, success-curve and
compare-bias (seeded experiment batches writing CSV plus a rendered
figure). Exit codes for synth: 0 plan found, 2 provably no plan for
any initial state, 3 budget exhausted without a plan, 4 input error.
Experiment commands exit 0 on completion and 4 on input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..errors import ConfigError, LassoplanError
from ..model import load_wts_file
from ..automaton import load_nba_file
from ..planner import SamplerConfig, plan_to_json, synthesize, synthesize_first
from .config import load_experiment_config
from .experiments import (
    run_benchmark,
    run_compare_bias,
    run_success_curve,
    write_csv,
)
from .figures import (
    figure_path,
    plot_benchmark,
    plot_compare_bias,
    plot_success_curve,
)

EXIT_OK = 0
EXIT_NO_PLAN_EXISTS = 2
EXIT_BUDGET_EXHAUSTED = 3
EXIT_INPUT_ERROR = 4


def _add_synth(sub) -> None:
    p = sub.add_parser("synth", help="synthesize a plan for one instance")
    p.add_argument("--wts", nargs="+", required=True,
                   help="robot transition-system JSON files, robots 1..N in order")
    p.add_argument("--nba", required=True, help="task automaton JSON file")
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--n-pre", type=int, default=2000)
    p.add_argument("--n-suf", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p-rand", type=float, default=0.9)
    p.add_argument("--p-new", type=float, default=0.9)
    p.add_argument("--bias", default="sequential",
                   help="sequential | fixed:<state> | uniform")
    p.add_argument("--rewire", default="always", choices=["always", "on-goal", "never"])
    p.add_argument("--first", action="store_true",
                   help="stop at the first feasible plan instead of optimizing")
    p.add_argument("--out", default=None, help="write the plan as JSON here")


def _cmd_synth(args) -> int:
    try:
        team = [load_wts_file(f) for f in args.wts]
        nba = load_nba_file(args.nba)
        cfg = SamplerConfig(
            p_rand=args.p_rand, p_new=args.p_new, bias=args.bias,
            rng_seed=args.seed, rewire=args.rewire.replace("-", "_"),
        )
        runner = synthesize_first if args.first else synthesize
        report = runner(team, nba, beta=args.beta, n_max_pre=args.n_pre,
                        n_max_suf=args.n_suf, cfg=cfg)
    except (LassoplanError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    if report.plan is None:
        if not report.feasible_final_found:
            print("no plan exists: no reachable accepting state admits a cycle",
                  file=sys.stderr)
            return EXIT_NO_PLAN_EXISTS
        print("no plan found within the iteration budget", file=sys.stderr)
        return EXIT_BUDGET_EXHAUSTED
    plan = report.plan
    doc = plan_to_json(plan)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    else:
        json.dump(doc, sys.stdout, indent=2)
        print()
    print(
        f"plan found: J={plan.j_total:.6g} (prefix {plan.j_pre:.6g}, "
        f"suffix {plan.j_suf:.6g}); prefix length {len(plan.prefix)}, "
        f"suffix length {len(plan.suffix)}",
        file=sys.stderr,
    )
    return EXIT_OK


def _add_experiment(sub, name: str, help_text: str) -> None:
    p = sub.add_parser(name, help=help_text)
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--no-figure", action="store_true",
                   help="skip rendering the PNG next to the CSV")


def _cmd_experiment(name: str, args) -> int:
    try:
        cfg = load_experiment_config(args.config)
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        if name == "success-curve":
            header, rows = run_success_curve(cfg)
            write_csv(out, header, rows)
            if not args.no_figure:
                plot_success_curve(rows, figure_path(out))
        elif name == "compare-bias":
            (sh, srows), (dh, drows) = run_compare_bias(cfg)
            write_csv(out, sh, srows)
            detail = out.with_name(out.stem + "_trials" + out.suffix)
            write_csv(detail, dh, drows)
            if not args.no_figure:
                plot_compare_bias(drows, figure_path(out))
        elif name == "bench":
            header, rows = run_benchmark(cfg)
            write_csv(out, header, rows)
            if not args.no_figure:
                plot_benchmark(rows, figure_path(out))
        else:  # pragma: no cover
            raise ConfigError(f"unknown experiment {name}")
    except (LassoplanError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    print(f"wrote {args.out}", file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lassoplan",
        description="prefix-suffix plan synthesis and experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_synth(sub)
    _add_experiment(sub, "bench", "scalability benchmark to CSV")
    _add_experiment(sub, "success-curve", "detection-probability curve to CSV")
    _add_experiment(sub, "compare-bias", "biased versus uniform comparison to CSV")
    args = parser.parse_args(argv)
    if args.command == "synth":
        return _cmd_synth(args)
    return _cmd_experiment(args.command, args)


if __name__ == "__main__":
    sys.exit(main())
