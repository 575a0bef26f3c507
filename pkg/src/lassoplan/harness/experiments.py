"""Seeded experiment runners with CSV output.

All runners derive the trial seed as master xor trial index, so a
config (including its master seed) pins the statistical content of the
run; wall-clock columns are the one intentionally machine-dependent
part. Trials are independent and can run on a process pool; rows are
always emitted in trial order.
"""

from __future__ import annotations

import csv
import math
import random
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

from ..automaton import feasible_finals
from ..errors import ConfigError, ExplicitProductTooLarge
from ..model import team_initial
from ..oracle import build_explicit_pba, optimal_plan_exact
from ..planner import PlannerContext, SamplerConfig, construct_tree, synthesize_first
from ..seeds import derive_seed, trial_seed
from .config import ExperimentConfig, InstanceSpec

FMT = "%.9g"


def _fmt(x) -> str:
    if isinstance(x, float):
        return FMT % x
    return str(x)


def write_csv(path, header: list, rows: list) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def _sampler_config(cfg: ExperimentConfig, seed: int, bias: Optional[str] = None,
                    rewire: Optional[str] = None) -> SamplerConfig:
    return SamplerConfig(
        p_rand=cfg.p_rand,
        p_new=cfg.p_new,
        bias=cfg.bias if bias is None else bias,
        schedule=cfg.schedule,
        rng_seed=seed,
        rewire=cfg.rewire if rewire is None else rewire,
    )


# ---------------------------------------------------------------------------
# per-trial work units

def _first_plan_trial(ctx, team, nba, cfg: ExperimentConfig, seed: int, bias: str) -> dict:
    scfg = _sampler_config(cfg, seed, bias=bias)
    deadline = None
    if cfg.timeout_s is not None:
        deadline = time.perf_counter() + cfg.timeout_s
    t0 = time.perf_counter()
    rep = synthesize_first(
        team, nba, beta=cfg.beta, n_max_pre=cfg.n_max_pre,
        n_max_suf=cfg.n_max_suf, cfg=scfg, ctx=ctx, deadline=deadline,
    )
    wall_ms = (time.perf_counter() - t0) * 1e3
    if rep.plan is None:
        return {"status": "dnf", "wall_ms": wall_ms,
                "wall_ms_pre": rep.wall_ms_pre, "wall_ms_suf": rep.wall_ms_suf}
    return {
        "status": "ok",
        "iters_pre": rep.iters_pre,
        "iters_suf": rep.iters_suf,
        "iters_total": rep.iters_pre + rep.iters_suf,
        "tree_pre": rep.tree_pre,
        "tree_suf": rep.tree_suf,
        "wall_ms": wall_ms,
        "wall_ms_pre": rep.wall_ms_pre,
        "wall_ms_suf": rep.wall_ms_suf,
        "j_first": rep.plan.j_total,
        "prefix_len": len(rep.plan.prefix),
    }


def _pool_trial(args) -> dict:
    spec, cfg, seed, bias = args
    team, nba = spec.build()
    ctx = PlannerContext(team, nba)
    return _first_plan_trial(ctx, team, nba, cfg, seed, bias)


def _run_first_plan_trials(spec: InstanceSpec, cfg: ExperimentConfig, bias: str) -> list:
    seeds = [trial_seed(cfg.master_seed, t) for t in range(cfg.trials)]
    if cfg.workers > 1:
        jobs = [(spec, cfg, s, bias) for s in seeds]
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(_pool_trial, jobs))
    team, nba = spec.build()
    ctx = PlannerContext(team, nba)
    return [_first_plan_trial(ctx, team, nba, cfg, s, bias) for s in seeds]


# ---------------------------------------------------------------------------
# success curve

def _resolve_witness(cfg: ExperimentConfig, team, nba) -> tuple:
    """Witness prefix path and its goal product state.

    Either given explicitly in the config or found by a preliminary
    exact-oracle run on the explicit product.
    """
    if cfg.witness == "oracle":
        try:
            pba = build_explicit_pba(team, nba)
        except ExplicitProductTooLarge as exc:
            raise ConfigError(
                f"instance too large for an oracle witness, provide one: {exc}"
            ) from exc
        plan = optimal_plan_exact(pba, cfg.beta)
        if plan is None:
            raise ConfigError("goal unreachable: the oracle proves no plan exists")
        path = plan.prefix
    else:
        try:
            path = [(tuple(e["pts"]), e["buchi"]) for e in cfg.witness["path"]]
        except (TypeError, KeyError) as exc:
            raise ConfigError(f"malformed witness: {exc}") from exc
        if not path:
            raise ConfigError("witness path is empty")
    return path, path[-1]


def run_success_curve(cfg: ExperimentConfig) -> tuple:
    """Empirical detection probabilities versus iteration budget.

    Per budget: the fraction of trials in which the witness goal state
    entered the tree, and the fraction in which every state of the
    witness path entered the tree (the second can never exceed the
    first, the goal being the path's last state). Rewiring stays off;
    detection does not depend on it. One run per trial at the largest
    budget covers all budgets, since detection iterations only record
    when states first appear.
    """
    if len(cfg.instances) != 1:
        raise ConfigError("success_curve runs on a single instance")
    team, nba = cfg.instances[0].build()
    ctx = PlannerContext(team, nba)
    witness_path, goal_state = _resolve_witness(cfg, team, nba)
    budget = max(cfg.n_max_grid)
    finals_set = set(ctx.nba.finals)
    q_b0 = ctx.nba.initial[0]
    ff = feasible_finals(ctx.nba, ctx.dm, q_b0)
    if not ff:
        raise ConfigError("no feasible final state; success curve is void")

    goal_iters = []
    witness_iters = []
    for t in range(cfg.trials):
        seed = trial_seed(cfg.master_seed, t)
        scfg = _sampler_config(cfg, seed, rewire="never")
        remaining = set(witness_path)
        hit = {"goal": None, "witness": None}

        def track(tree, idx, iteration):
            node = (tree.pts[idx], tree.buchi[idx])
            if node == goal_state and hit["goal"] is None:
                hit["goal"] = iteration
            if node in remaining:
                remaining.discard(node)
                if not remaining and hit["witness"] is None:
                    hit["witness"] = iteration
            return hit["goal"] is not None and hit["witness"] is not None

        rng = random.Random(derive_seed(seed, "pre", 0))
        construct_tree(
            lambda pts, b: b in finals_set, ctx, (team_initial(team), q_b0),
            budget, "prefix", scfg, rng, bias_targets=ff, on_insert=track,
        )
        goal_iters.append(hit["goal"])
        witness_iters.append(hit["witness"])

    rows = []
    for n in sorted(cfg.n_max_grid):
        goal_hits = sum(1 for g in goal_iters if g is not None and g <= n)
        wit_hits = sum(1 for w in witness_iters if w is not None and w <= n)
        rows.append(
            (n, cfg.trials, goal_hits, wit_hits,
             goal_hits / cfg.trials, wit_hits / cfg.trials)
        )
    header = ["n_max", "trials", "goal_hits", "witness_hits", "pi_suc", "p_y_geq_k"]
    return header, rows


# ---------------------------------------------------------------------------
# biased versus uniform comparison

def run_compare_bias(cfg: ExperimentConfig) -> tuple:
    """Paired-seed comparison of biased and uniform sampling.

    Both variants run the same per-trial seeds. Medians are over
    completed trials only, with the completed count reported beside
    them. Timed-out or budget-exhausted trials appear as dnf rows.
    """
    if len(cfg.instances) != 1:
        raise ConfigError("compare_bias runs on a single instance")
    spec = cfg.instances[0]
    variants = [("biased", cfg.bias if cfg.bias != "uniform" else "sequential"),
                ("uniform", "uniform")]
    detail_rows = []
    summary_rows = []
    for vname, bias in variants:
        results = _run_first_plan_trials(spec, cfg, bias)
        for t, r in enumerate(results):
            detail_rows.append((
                vname, t, trial_seed(cfg.master_seed, t), r["status"],
                r.get("iters_pre", ""), r.get("iters_suf", ""),
                r.get("iters_total", ""), r["wall_ms"],
                r.get("j_first", ""), r.get("prefix_len", ""),
            ))
        done = [r for r in results if r["status"] == "ok"]
        summary_rows.append((
            vname, cfg.trials, len(done),
            statistics.median(r["iters_total"] for r in done) if done else "",
            statistics.median(r["wall_ms"] for r in done) if done else "",
            statistics.median(r["j_first"] for r in done) if done else "",
            (sum(r["prefix_len"] for r in done) / len(done)) if done else "",
        ))
    summary_header = ["variant", "trials", "completed", "median_iters_to_plan",
                      "median_wall_ms", "median_j_first", "mean_prefix_len"]
    detail_header = ["variant", "trial", "seed", "status", "iters_pre",
                     "iters_suf", "iters_total", "wall_ms", "j_first", "prefix_len"]
    return (summary_header, summary_rows), (detail_header, detail_rows)


# ---------------------------------------------------------------------------
# scalability benchmark

def product_exponent(team, nba) -> int:
    """Power-of-ten order of the product state count, computed in logs."""
    return round(math.log10(len(nba.states))
                 + sum(math.log10(len(w.states)) for w in team))


def run_benchmark(cfg: ExperimentConfig) -> tuple:
    """First-feasible-plan statistics, one row per instance per trial."""
    rows = []
    for spec in cfg.instances:
        team, nba = spec.build()
        exp = product_exponent(team, nba)
        qi = max(len(w.states) for w in team)
        n_robots = len(team)
        results = _run_first_plan_trials(spec, cfg, cfg.bias)
        for t, r in enumerate(results):
            rows.append((
                spec.name, t, n_robots, qi, f"10^{exp}", r["status"],
                r.get("iters_pre", ""), r.get("iters_suf", ""),
                r.get("tree_pre", ""), r.get("tree_suf", ""),
                r["wall_ms_pre"], r["wall_ms_suf"],
            ))
    header = ["instance", "trial", "n_robots", "q_i", "q_p", "status",
              "n_pre", "n_suf", "tree_pre", "tree_suf",
              "wall_ms_pre", "wall_ms_suf"]
    return header, rows
