"""Prefix-suffix plan synthesis.

A plan is a finite prefix from the initial product state to an
accepting state plus a cycle (suffix) through that state, executed as
prefix then suffix forever. Synthesis builds one biased tree per
initial automaton state for the prefix, then one tree per discovered
accepting node for its suffix, and keeps the plan minimizing
beta * prefix cost + (1 - beta) * suffix cost.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..automaton import Nba, feasible_finals
from ..errors import ConfigError
from ..model import Wts, team_initial
from ..seeds import derive_seed
from .config import SamplerConfig
from .construct import ConstructResult, construct_tree
from .context import PlannerContext
from .tree import INF, Tree


@dataclass
class Plan:
    """A prefix path and a suffix cycle over (team state, automaton state).

    The suffix starts at the prefix's last state; its closing edge leads
    from its last state back to its first. Costs follow the weighted
    team moves; j_total = beta * j_pre + (1 - beta) * j_suf.
    """

    prefix: list
    suffix: list
    j_pre: float
    j_suf: float
    beta: float
    stats: dict = field(default_factory=dict)

    @property
    def j_total(self) -> float:
        return self.beta * self.j_pre + (1.0 - self.beta) * self.j_suf


def plan_to_json(plan: Plan) -> dict:
    return {
        "beta": plan.beta,
        "j_pre": plan.j_pre,
        "j_suf": plan.j_suf,
        "j_total": plan.j_total,
        "prefix": [{"pts": list(p), "buchi": b} for p, b in plan.prefix],
        "suffix": [{"pts": list(p), "buchi": b} for p, b in plan.suffix],
        "stats": plan.stats,
    }


def plan_from_json(doc: dict) -> Plan:
    return Plan(
        prefix=[(tuple(e["pts"]), e["buchi"]) for e in doc["prefix"]],
        suffix=[(tuple(e["pts"]), e["buchi"]) for e in doc["suffix"]],
        j_pre=float(doc["j_pre"]),
        j_suf=float(doc["j_suf"]),
        beta=float(doc["beta"]),
        stats=doc.get("stats", {}),
    )


def _bias_targets(cfg: SamplerConfig, ff: list, nba: Nba) -> list:
    fixed = cfg.fixed_target
    if fixed is None:
        return ff
    if fixed not in nba.finals:
        raise ConfigError(f"fixed bias target {fixed!r} is not a final state")
    return [fixed] if fixed in ff else ff


def _trivial_suffix(ctx: PlannerContext, pts: tuple, b) -> bool:
    """Zero-cost loop at an accepting state: all robots can wait for free
    and the automaton allows staying put under the current label."""
    g = ctx.guard(b, b)
    if g is None or not g.sat(pts):
        return False
    w = 0.0
    for i in range(ctx.n_robots):
        key = (pts[i], pts[i])
        wi = ctx.weights[i].get(key)
        if wi is None:
            return False
        w += wi
    return w == 0.0


def _suffix_goal(ctx: PlannerContext, root_pts: tuple, root_b):
    """Membership test for states with a one-hop product move to the root."""

    def goal(pts: tuple, b) -> bool:
        g = ctx.guard(b, root_b)
        if g is None or not g.sat(pts):
            return False
        return ctx.pts_edge_ok(pts, root_pts)

    return goal


def _best_loop_close(ctx: PlannerContext, res: ConstructResult, root_pts: tuple):
    """Cheapest loop: tree path to a goal node plus the closing edge."""
    tree = res.tree
    best = None
    best_cost = INF
    for i in res.goals:
        c = tree.cost[i] + ctx.pts_weight(tree.pts[i], root_pts)
        if c < best_cost:
            best_cost = c
            best = i
    return best, best_cost


@dataclass
class SynthesisReport:
    """Bookkeeping alongside a (possibly absent) plan."""

    plan: Optional[Plan]
    feasible_final_found: bool  # False means provably no prefix-suffix plan
    iters_pre: int = 0
    iters_suf: int = 0
    tree_pre: int = 0
    tree_suf: int = 0
    wall_ms_pre: float = 0.0
    wall_ms_suf: float = 0.0
    timed_out: bool = False

    def stats(self) -> dict:
        return {
            "iters_pre": self.iters_pre,
            "iters_suf": self.iters_suf,
            "tree_pre": self.tree_pre,
            "tree_suf": self.tree_suf,
            "wall_ms_pre": round(self.wall_ms_pre, 3),
            "wall_ms_suf": round(self.wall_ms_suf, 3),
        }


def synthesize(
    team: Sequence[Wts],
    nba: Nba,
    beta: float = 0.5,
    n_max_pre: int = 2000,
    n_max_suf: int = 2000,
    cfg: Optional[SamplerConfig] = None,
    ctx: Optional[PlannerContext] = None,
) -> SynthesisReport:
    """Full-budget anytime synthesis; returns the best plan found.

    Every initial automaton state gets a prefix tree run for the whole
    budget. Suffix trees are then built per accepting node in ascending
    prefix cost; nodes whose scaled prefix cost cannot beat the best
    total are skipped, as are accepting states without a feasible
    automaton cycle (neither skip can change the argmin).
    """
    if not 0.0 <= beta <= 1.0:
        raise ConfigError(f"beta must be in [0,1], got {beta}")
    cfg = cfg or SamplerConfig()
    ctx = ctx or PlannerContext(team, nba)
    nba = ctx.nba
    finals_set = set(nba.finals)
    pts0 = team_initial(ctx.team)

    best: Optional[Plan] = None
    report = SynthesisReport(plan=None, feasible_final_found=False)

    def goal_pre(pts, b):
        return b in finals_set

    for b0_idx, q_b0 in enumerate(nba.initial):
        ff = feasible_finals(nba, ctx.dm, q_b0)
        if not ff:
            continue
        report.feasible_final_found = True
        rng_pre = random.Random(derive_seed(cfg.rng_seed, "pre", b0_idx))
        res_pre = construct_tree(
            goal_pre, ctx, (pts0, q_b0), n_max_pre, "prefix", cfg, rng_pre,
            bias_targets=_bias_targets(cfg, ff, nba),
        )
        tree = res_pre.tree
        ordered = sorted(res_pre.goals, key=lambda i: (tree.cost[i], i))
        for a_idx, a in enumerate(ordered):
            j_pre = tree.cost[a]
            if best is not None and beta * j_pre >= best.j_total:
                break
            a_pts, a_b = tree.pts[a], tree.buchi[a]
            if ctx.dm.dcyc(a_b) == INF:
                continue
            suffix = None
            j_suf = INF
            res_suf = None
            if _trivial_suffix(ctx, a_pts, a_b):
                suffix = [(a_pts, a_b)]
                j_suf = 0.0
            else:
                rng_suf = random.Random(derive_seed(cfg.rng_seed, "suf", b0_idx, a_idx))
                res_suf = construct_tree(
                    _suffix_goal(ctx, a_pts, a_b), ctx, (a_pts, a_b),
                    n_max_suf, "suffix", cfg, rng_suf, bias_targets=[a_b],
                )
                s, close_cost = _best_loop_close(ctx, res_suf, a_pts)
                if s is not None:
                    suffix = res_suf.tree.find_path(s)
                    j_suf = close_cost
            if suffix is None:
                continue
            j_total = beta * j_pre + (1.0 - beta) * j_suf
            if best is None or j_total < best.j_total:
                best = Plan(
                    prefix=tree.find_path(a), suffix=suffix,
                    j_pre=j_pre, j_suf=j_suf, beta=beta,
                )
                report.iters_pre = res_pre.iterations
                report.tree_pre = len(tree)
                report.wall_ms_pre = res_pre.wall_ms
                if res_suf is None:
                    report.iters_suf = 0
                    report.tree_suf = 1
                    report.wall_ms_suf = 0.0
                else:
                    report.iters_suf = res_suf.iterations
                    report.tree_suf = len(res_suf.tree)
                    report.wall_ms_suf = res_suf.wall_ms
    if best is not None:
        best.stats = report.stats()
    report.plan = best
    return report


def synthesize_first(
    team: Sequence[Wts],
    nba: Nba,
    beta: float = 0.5,
    n_max_pre: int = 2000,
    n_max_suf: int = 2000,
    cfg: Optional[SamplerConfig] = None,
    ctx: Optional[PlannerContext] = None,
    deadline: Optional[float] = None,
) -> SynthesisReport:
    """Stop at the first feasible plan.

    As soon as an accepting node enters the prefix tree, a suffix tree
    rooted there is attempted; success ends the run. Iteration counts
    report the prefix rounds consumed at that point and the winning
    suffix attempt's rounds.
    """
    if not 0.0 <= beta <= 1.0:
        raise ConfigError(f"beta must be in [0,1], got {beta}")
    cfg = cfg or SamplerConfig()
    ctx = ctx or PlannerContext(team, nba)
    nba = ctx.nba
    finals_set = set(nba.finals)
    pts0 = team_initial(ctx.team)
    report = SynthesisReport(plan=None, feasible_final_found=False)

    def goal_pre(pts, b):
        return b in finals_set

    for b0_idx, q_b0 in enumerate(nba.initial):
        ff = feasible_finals(nba, ctx.dm, q_b0)
        if not ff:
            continue
        report.feasible_final_found = True
        found: dict = {}
        attempted: set = set()
        suffix_budget_left = [n_max_suf * 8]  # cap on total suffix work

        def try_suffix(tree: Tree, idx: int, iteration: int) -> bool:
            a_pts, a_b = tree.pts[idx], tree.buchi[idx]
            if not goal_pre(a_pts, a_b):
                return False
            key = (a_pts, a_b)
            if key in attempted:
                return False
            attempted.add(key)
            if ctx.dm.dcyc(a_b) == INF:
                return False
            if _trivial_suffix(ctx, a_pts, a_b):
                found.update(prefix_idx=idx, suffix=[(a_pts, a_b)], j_suf=0.0,
                             res_suf=None, iteration=iteration)
                return True
            if suffix_budget_left[0] <= 0:
                return False
            budget = min(n_max_suf, suffix_budget_left[0])
            rng_suf = random.Random(
                derive_seed(cfg.rng_seed, "suf1", b0_idx, len(attempted)))
            res_suf = construct_tree(
                _suffix_goal(ctx, a_pts, a_b), ctx, (a_pts, a_b), budget,
                "suffix", cfg, rng_suf, bias_targets=[a_b],
                stop_at_first_goal=True, deadline=deadline,
            )
            suffix_budget_left[0] -= res_suf.iterations
            if not res_suf.goals:
                return False
            s, close_cost = _best_loop_close(ctx, res_suf, a_pts)
            found.update(prefix_idx=idx, suffix=res_suf.tree.find_path(s),
                         j_suf=close_cost, res_suf=res_suf, iteration=iteration)
            return True

        rng_pre = random.Random(derive_seed(cfg.rng_seed, "pre", b0_idx))
        res_pre = construct_tree(
            goal_pre, ctx, (pts0, q_b0), n_max_pre, "prefix", cfg, rng_pre,
            bias_targets=_bias_targets(cfg, ff, nba),
            deadline=deadline, on_insert=try_suffix,
        )
        report.timed_out = report.timed_out or res_pre.timed_out
        if found:
            tree = res_pre.tree
            a = found["prefix_idx"]
            plan = Plan(
                prefix=tree.find_path(a), suffix=found["suffix"],
                j_pre=tree.cost[a], j_suf=found["j_suf"], beta=beta,
            )
            report.iters_pre = found["iteration"]
            report.tree_pre = len(tree)
            report.wall_ms_pre = res_pre.wall_ms
            res_suf = found["res_suf"]
            if res_suf is None:
                report.iters_suf = 0
                report.tree_suf = 1
            else:
                report.iters_suf = res_suf.iterations
                report.tree_suf = len(res_suf.tree)
                report.wall_ms_suf = res_suf.wall_ms
            plan.stats = report.stats()
            report.plan = plan
            return report
    return report
