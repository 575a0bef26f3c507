"""Incremental tree construction toward a goal set."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .config import SamplerConfig
from .context import PlannerContext
from .sampler import SampleState, sample
from .tree import INF, Tree


@dataclass
class ConstructResult:
    tree: Tree
    goals: list           # node indices in the goal set, in insertion order
    iterations: int       # sampling rounds consumed
    first_goal_iteration: Optional[int]
    wall_ms: float
    timed_out: bool = False


class _BiasSchedule:
    """Target rotation and the switch to uniform exploration.

    In prefix mode the target walks sequentially over the feasible final
    states, moving on whenever the current one gets a node in the tree;
    after every target has been detected the sampler goes uniform (or
    keeps cycling under an always-biased schedule). In suffix mode there
    is a single target, the root's automaton state, and detection means
    a goal node (a state that closes the loop) has appeared.
    """

    def __init__(self, tree: Tree, cfg: SamplerConfig, state: SampleState,
                 targets: Sequence):
        self.tree = tree
        self.cfg = cfg
        self.state = state
        self.targets = list(targets)
        self.pos = 0
        self.detected: set = set()
        self.cycle_always = cfg.schedule == "always_biased"

    def _go_uniform(self) -> None:
        self.state.uniform = True

    def note_iteration(self, n: int) -> None:
        after = self.cfg.uniform_after
        if after is not None and n > after and not self.state.uniform:
            self._go_uniform()

    def note_insert(self, idx: int, is_goal: bool) -> None:
        if self.state.uniform or not self.targets:
            return
        tree = self.tree
        if tree.mode == "suffix":
            if is_goal:
                if self.cycle_always:
                    return
                self._go_uniform()
            return
        b = tree.buchi[idx]
        if b in self.targets:
            self.detected.add(b)
        if self.targets[self.pos] in self.detected:
            self._advance()

    def _advance(self) -> None:
        k = len(self.targets)
        for step in range(1, k + 1):
            cand = self.targets[(self.pos + step) % k]
            if cand not in self.detected:
                self.pos = (self.pos + step) % k
                self.tree.set_target(cand)
                return
        if self.cycle_always:
            self.pos = (self.pos + 1) % k
            self.tree.set_target(self.targets[self.pos])
        else:
            self._go_uniform()


def construct_tree(
    goal: Callable,
    ctx: PlannerContext,
    root: tuple,
    n_max: int,
    mode: str,
    cfg: SamplerConfig,
    rng: random.Random,
    bias_targets: Optional[Sequence] = None,
    stop_at_first_goal: bool = False,
    deadline: Optional[float] = None,
    on_insert: Optional[Callable] = None,
) -> ConstructResult:
    """Grow a tree rooted at root for up to n_max sampling rounds.

    goal takes (team state, automaton state) and marks the set returned
    in ConstructResult.goals. Every sampled team state is paired with
    each automaton state in declaration order: unseen pairs extend the
    tree, existing ones trigger rewiring when the rewire policy allows.

    on_insert, when given, runs for every inserted node (the root
    included) and may request an early stop by returning a truthy value.
    """
    t0 = time.perf_counter()
    root_pts, root_buchi = root
    uniform_start = cfg.bias == "uniform"
    if bias_targets is None:
        bias_targets = []
    target0 = None if (uniform_start or not bias_targets) else bias_targets[0]
    tree = Tree(ctx, root_pts, root_buchi, mode, target=target0)
    state = SampleState(cfg.p_rand, cfg.p_new, uniform=uniform_start or not bias_targets)
    schedule = _BiasSchedule(tree, cfg, state, bias_targets)

    goals: list = []
    first_goal_iter: Optional[int] = None
    rewire_on = cfg.rewire == "always"

    def handle_insert(idx: int, iteration: int) -> bool:
        """Bookkeeping for a fresh node; returns True to stop construction."""
        nonlocal first_goal_iter, rewire_on
        is_goal = goal(tree.pts[idx], tree.buchi[idx])
        if is_goal:
            goals.append(idx)
            if first_goal_iter is None:
                first_goal_iter = iteration
                if cfg.rewire == "on_goal":
                    rewire_on = True
        schedule.note_insert(idx, is_goal)
        stop = is_goal and stop_at_first_goal
        if on_insert is not None and on_insert(tree, idx, iteration):
            stop = True
        return stop

    if handle_insert(0, 0):
        return ConstructResult(tree, goals, 0, first_goal_iter,
                               (time.perf_counter() - t0) * 1e3)

    states_order = ctx.nba.states
    skip_unreachable = cfg.skip_unreachable_buchi
    stall_limit = cfg.stall_uniform_after
    if cfg.schedule == "always_biased":
        stall_limit = None
    dm = ctx.dm
    timed_out = False
    iterations = 0
    stalled = 0
    for n in range(1, n_max + 1):
        iterations = n
        if deadline is not None and n % 64 == 0 and time.perf_counter() > deadline:
            timed_out = True
            iterations = n - 1
            break
        schedule.note_iteration(n)
        if (
            stall_limit is not None
            and stalled >= stall_limit
            and not state.uniform
        ):
            state.uniform = True
        new_pts = sample(tree, state, rng)
        if new_pts is None:
            stalled += 1
            continue
        parents_raw = tree.parents_for(new_pts)
        stop = False
        inserted = False
        for b in states_order:
            idx = tree.by_key.get((new_pts, b))
            if idx is None:
                if (
                    skip_unreachable
                    and tree.target is not None
                    and dm.d(b, tree.target) == INF
                ):
                    continue
                if not parents_raw:
                    continue
                new_idx = tree.extend(new_pts, b, parents_raw)
                if new_idx is not None:
                    inserted = True
                    if handle_insert(new_idx, n):
                        stop = True
                        break
            elif rewire_on:
                tree.rewire(idx)
        stalled = 0 if inserted else stalled + 1
        if stop:
            break
    return ConstructResult(
        tree, goals, iterations, first_goal_iter,
        (time.perf_counter() - t0) * 1e3, timed_out,
    )
