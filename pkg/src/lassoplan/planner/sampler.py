"""Biased sampling of candidate team states.

Each draw starts from a tree node, chosen so that the frontier nearest
the bias target carries probability mass p_rand. From the node's label
the enabled automaton successors are intersected with the states that
strictly decrease the hop distance to the target; the fixed symbol of
the chosen transition then tells every steered robot which region it
must head for, and each robot's next state is drawn with mass p_new on
the first hop of its shortest path there. An iteration may yield no
sample when no enabled successor can make progress toward the target.

In uniform mode all of this collapses to uniform node and one-hop
choices with no gating, which is exactly what the biased densities
reduce to at their uniform parameter values.
"""

from __future__ import annotations

import random
from typing import Optional

from .context import PlannerContext
from .tree import INF, Tree


class SampleState:
    """Mutable per-tree sampling mode: current masses plus uniform switch."""

    __slots__ = ("p_rand", "p_new", "uniform")

    def __init__(self, p_rand: float, p_new: float, uniform: bool = False):
        self.p_rand = p_rand
        self.p_new = p_new
        self.uniform = uniform


def draw_node(tree: Tree, state: SampleState, rng: random.Random) -> int:
    """Pick a tree node from the frontier-weighted node distribution."""
    if state.uniform:
        return rng.randrange(len(tree))
    dmin = tree.dmin_nodes
    rest = tree.rest
    if not rest:
        return dmin[rng.randrange(len(dmin))]
    if not dmin:
        return rest[rng.randrange(len(rest))]
    if rng.random() < state.p_rand:
        return dmin[rng.randrange(len(dmin))]
    return rest[rng.randrange(len(rest))]


def frand_probabilities(tree: Tree, state: SampleState) -> list:
    """Node-indexed probability vector of the node-selection density."""
    n = len(tree)
    if state.uniform:
        return [1.0 / n] * n
    out = [0.0] * n
    dmin = tree.dmin_nodes
    rest = tree.rest
    if not rest:
        for i in dmin:
            out[i] = 1.0 / len(dmin)
        return out
    if not dmin:
        for i in rest:
            out[i] = 1.0 / len(rest)
        return out
    for i in dmin:
        out[i] = state.p_rand / len(dmin)
    for i in rest:
        out[i] = (1.0 - state.p_rand) / len(rest)
    return out


def _chain(tree: Tree, pts: tuple, b_rand, rng: random.Random) -> Optional[tuple]:
    """Choose the automaton hop to steer toward; None when gated out.

    Returns (q_b_min, q_b_decr, lmap) where lmap holds one target region
    per team position (None where the symbol leaves the robot free).
    """
    ctx = tree.ctx
    guard_of = ctx.guard
    reach = [b for b in ctx.feas_succ[b_rand] if guard_of(b_rand, b).sat(pts)]
    if not reach:
        return None
    dm = ctx.dm
    target = tree.target
    dists = [dm.d(b, target) for b in reach]
    d_best = min(dists)
    if d_best == INF:
        return None
    decr_of = {}
    candidates = []
    for b, d in zip(reach, dists):
        if d != d_best:
            continue
        decr = [b2 for b2 in ctx.feas_succ[b] if dm.d(b2, target) == d - 1]
        if decr:
            decr_of[b] = decr
            candidates.append(b)
    if not candidates:
        return None
    q_b_min = candidates[rng.randrange(len(candidates))]
    decr = decr_of[q_b_min]
    q_b_decr = decr[rng.randrange(len(decr))]
    return q_b_min, q_b_decr, ctx.lmap(q_b_min, q_b_decr)


def _robot_goal(tree: Tree, lmap: tuple, q_b_decr, i: int):
    goal = lmap[i]
    if goal is None and tree.mode == "suffix" and q_b_decr == tree.root_buchi:
        # heading back: free robots steer toward their root positions
        goal = tree.root_pts[i]
    return goal


def robot_step_probabilities(
    ctx: PlannerContext, robot: int, here, hop, p_new: float
) -> list:
    """Distribution over the robot's one-hop successors, hop getting p_new."""
    succ = ctx.succ[robot][here]
    n = len(succ)
    if n == 1:
        return [1.0]
    if hop is None:
        return [1.0 / n] * n
    rest = (1.0 - p_new) / (n - 1)
    return [p_new if s == hop else rest for s in succ]


def _draw_robot_step(
    ctx: PlannerContext, robot: int, here, hop, p_new: float, rng: random.Random
):
    succ = ctx.succ[robot][here]
    n = len(succ)
    if n == 1:
        return succ[0]
    if hop is None:
        return succ[rng.randrange(n)]
    if rng.random() < p_new:
        return hop
    while True:
        s = succ[rng.randrange(n)]
        if s != hop:
            return s


def sample(tree: Tree, state: SampleState, rng: random.Random) -> Optional[tuple]:
    """One sampling round; returns a new team state or None.

    None happens only in biased mode, when the drawn node has no enabled
    automaton successor or none of its nearest successors can decrease
    the distance to the target. The iteration still counts.
    """
    ctx = tree.ctx
    idx = draw_node(tree, state, rng)
    pts = tree.pts[idx]
    if state.uniform:
        out = []
        for i in range(ctx.n_robots):
            succ = ctx.succ[i][pts[i]]
            out.append(succ[rng.randrange(len(succ))])
        return tuple(out)
    chain = _chain(tree, pts, tree.buchi[idx], rng)
    if chain is None:
        return None
    _, q_b_decr, lmap = chain
    new_pts = []
    for i in range(ctx.n_robots):
        here = pts[i]
        goal = _robot_goal(tree, lmap, q_b_decr, i)
        hop = None if goal is None else ctx.paths.next_hop(i, here, goal)
        new_pts.append(_draw_robot_step(ctx, i, here, hop, state.p_new, rng))
    return tuple(new_pts)


def sample_probe(tree: Tree, state: SampleState, rng: random.Random) -> dict:
    """Like sample, but also reports the constructed probability vectors.

    Intended for audits of the densities: the node-selection vector and,
    when a sample is produced, each robot's step distribution over its
    one-hop successors.
    """
    ctx = tree.ctx
    info: dict = {"frand": frand_probabilities(tree, state), "fnew": None,
                  "sample": None, "node": None}
    idx = draw_node(tree, state, rng)
    info["node"] = idx
    pts = tree.pts[idx]
    if state.uniform:
        fnew = []
        new_pts = []
        for i in range(ctx.n_robots):
            succ = ctx.succ[i][pts[i]]
            fnew.append([1.0 / len(succ)] * len(succ))
            new_pts.append(succ[rng.randrange(len(succ))])
        info["fnew"] = fnew
        info["sample"] = tuple(new_pts)
        return info
    chain = _chain(tree, pts, tree.buchi[idx], rng)
    if chain is None:
        return info
    _, q_b_decr, lmap = chain
    fnew = []
    new_pts = []
    for i in range(ctx.n_robots):
        here = pts[i]
        goal = _robot_goal(tree, lmap, q_b_decr, i)
        hop = None if goal is None else ctx.paths.next_hop(i, here, goal)
        fnew.append(robot_step_probabilities(ctx, i, here, hop, state.p_new))
        new_pts.append(_draw_robot_step(ctx, i, here, hop, state.p_new, rng))
    info["fnew"] = fnew
    info["sample"] = tuple(new_pts)
    return info
