"""Ground-truth machinery, usable at desk scale only.

Materializes the full product of the team transition systems and the
task automaton as an explicit weighted graph, computes provably optimal
prefix-suffix plans on it with Dijkstra runs, and checks candidate
plans against the product transition rule. This is the baseline the
tree-based synthesizer is validated against; its memory use is exactly
what the sampler exists to avoid, hence the hard node cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from heapq import heappop, heappush
from itertools import product as iproduct
from typing import Optional, Sequence

from .automaton import Nba, guard_sat
from .errors import ExplicitProductTooLarge
from .model import Wts, team_initial, team_label, validate_team
from .planner.synthesize import Plan

INF = float("inf")

DEFAULT_NODE_CAP = 2_000_000


@dataclass
class ExplicitPba:
    """Reachable product graph: nodes are (team state, automaton state)."""

    nodes: list
    index: dict
    adj: list        # adj[i] = list of (j, weight)
    initials: list   # node indices
    finals: set      # node indices


def _estimated_size(team: Sequence[Wts], nba: Nba) -> int:
    est = len(nba.states)
    for wts in team:
        est *= len(wts.states)
    return est


def build_explicit_pba(
    team: Sequence[Wts], nba: Nba, cap: int = DEFAULT_NODE_CAP
) -> ExplicitPba:
    """Breadth-first reachable product graph from all initial states.

    Uses the original (unpruned) transition guards; refuses instances
    whose state-space estimate or reachable set exceeds the cap.
    """
    validate_team(team)
    est = _estimated_size(team, nba)
    if est > cap:
        raise ExplicitProductTooLarge(
            f"estimated {est} product states exceeds cap {cap}"
        )
    finals_b = set(nba.finals)
    pts0 = team_initial(team)

    nodes: list = []
    index: dict = {}
    adj: list = []
    initials: list = []
    finals: set = set()

    def intern(pts, b) -> int:
        key = (pts, b)
        i = index.get(key)
        if i is None:
            i = len(nodes)
            if i >= cap:
                raise ExplicitProductTooLarge(f"reachable set exceeds cap {cap}")
            index[key] = i
            nodes.append(key)
            adj.append([])
            if b in finals_b:
                finals.add(i)
        return i

    for b0 in nba.initial:
        initials.append(intern(pts0, b0))

    frontier = list(initials)
    seen_expanded = set()
    while frontier:
        i = frontier.pop()
        if i in seen_expanded:
            continue
        seen_expanded.add(i)
        pts, b = nodes[i]
        label = team_label(team, pts)
        enabled = [
            b2 for b2 in nba.successors(b)
            if guard_sat(nba.transitions[(b, b2)], label)
        ]
        if not enabled:
            continue
        moves = []
        for k, wts in enumerate(team):
            here = pts[k]
            moves.append([(q, wts._weight[(here, q)]) for q in wts._succ[here]])
        for combo in iproduct(*moves):
            pts2 = tuple(q for q, _ in combo)
            w = sum(wq for _, wq in combo)
            for b2 in enabled:
                j = intern(pts2, b2)
                adj[i].append((j, w))
                if j not in seen_expanded:
                    frontier.append(j)
    return ExplicitPba(nodes, index, adj, initials, finals)


def _dijkstra(adj: list, sources: Sequence[int]) -> tuple:
    n = len(adj)
    dist = [INF] * n
    parent = [-1] * n
    heap = []
    for s in sources:
        dist[s] = 0.0
        heappush(heap, (0.0, s))
    while heap:
        d, u = heappop(heap)
        if d > dist[u]:
            continue
        for v, w in adj[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                heappush(heap, (nd, v))
    return dist, parent


def _reverse(adj: list) -> list:
    rev: list = [[] for _ in adj]
    for u, row in enumerate(adj):
        for v, w in row:
            rev[v].append((u, w))
    return rev


def optimal_plan_exact(pba: ExplicitPba, beta: float = 0.5) -> Optional[Plan]:
    """Provably optimal prefix-suffix plan on the explicit graph.

    One multi-source Dijkstra gives prefix costs to every accepting
    node; per accepting node a Dijkstra on the reversed graph gives the
    cheapest cycle through it (zero-weight self-loops count). Accepting
    nodes are visited in ascending prefix cost so hopeless ones are
    skipped once the best total cannot be beaten.
    """
    dist_pre, parent_pre = _dijkstra(pba.adj, pba.initials)
    rev = _reverse(pba.adj)
    candidates = sorted(
        (f for f in pba.finals if dist_pre[f] < INF),
        key=lambda f: (dist_pre[f], f),
    )
    best = None  # (j_total, f, j_pre, j_suf, first_hop, dist_to_f, parent_to)
    for f in candidates:
        j_pre = dist_pre[f]
        if best is not None and beta * j_pre >= best[0]:
            break
        dist_to_f, parent_to = _dijkstra(rev, [f])
        j_suf = INF
        first_hop = None
        for v, w in pba.adj[f]:
            c = w + dist_to_f[v]
            if c < j_suf:
                j_suf = c
                first_hop = v
        if first_hop is None or j_suf == INF:
            continue
        j_total = beta * j_pre + (1.0 - beta) * j_suf
        if best is None or j_total < best[0]:
            best = (j_total, f, j_pre, j_suf, first_hop, dist_to_f, parent_to)
    if best is None:
        return None
    _, f, j_pre, j_suf, first_hop, dist_to_f, parent_to = best

    prefix_idx = [f]
    while parent_pre[prefix_idx[-1]] != -1:
        prefix_idx.append(parent_pre[prefix_idx[-1]])
    prefix_idx.reverse()

    suffix_idx = [f]
    u = first_hop
    while u != f:
        suffix_idx.append(u)
        u = parent_to[u]  # parent in the reversed graph = next hop toward f
    return Plan(
        prefix=[pba.nodes[i] for i in prefix_idx],
        suffix=[pba.nodes[i] for i in suffix_idx],
        j_pre=j_pre,
        j_suf=j_suf,
        beta=beta,
    )


@dataclass
class VerifyResult:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _valid_move(team, nba: Nba, src, dst) -> Optional[str]:
    pts, b = src
    pts2, b2 = dst
    for k, wts in enumerate(team):
        if not wts.has_edge(pts[k], pts2[k]):
            return f"robot {wts.robot_id} has no edge {pts[k]!r} -> {pts2[k]!r}"
    g = nba.transitions.get((b, b2))
    if g is None:
        return f"no automaton transition {b!r} -> {b2!r}"
    if not guard_sat(g, team_label(team, pts)):
        return f"guard on {b!r} -> {b2!r} unsatisfied at {pts!r}"
    return None


def verify_plan(plan: Plan, team: Sequence[Wts], nba: Nba) -> VerifyResult:
    """Check a plan against the product transition rule.

    Conditions: the prefix starts at an initial product state, every
    consecutive pair (and the suffix's closing edge) is a valid product
    move, and the suffix passes through an accepting automaton state
    once per period.
    """
    if not plan.prefix:
        return VerifyResult(False, "empty prefix")
    if not plan.suffix:
        return VerifyResult(False, "empty suffix")
    pts_start, b_start = plan.prefix[0]
    if tuple(pts_start) != team_initial(team):
        return VerifyResult(False, f"prefix starts at {pts_start!r}, not the team initial")
    if b_start not in nba.initial:
        return VerifyResult(False, f"prefix starts at non-initial automaton state {b_start!r}")
    for k in range(len(plan.prefix) - 1):
        err = _valid_move(team, nba, plan.prefix[k], plan.prefix[k + 1])
        if err:
            return VerifyResult(False, f"prefix edge {k}: {err}")
    if plan.suffix[0] != plan.prefix[-1]:
        return VerifyResult(False, "suffix does not start at the prefix's last state")
    for k in range(len(plan.suffix) - 1):
        err = _valid_move(team, nba, plan.suffix[k], plan.suffix[k + 1])
        if err:
            return VerifyResult(False, f"suffix edge {k}: {err}")
    err = _valid_move(team, nba, plan.suffix[-1], plan.suffix[0])
    if err:
        return VerifyResult(False, f"suffix closing edge: {err}")
    finals = set(nba.finals)
    if not any(b in finals for _, b in plan.suffix):
        return VerifyResult(False, "suffix never visits an accepting state")
    return VerifyResult(True)


def plan_cost_check(plan: Plan, team: Sequence[Wts], tol: float = 1e-9) -> bool:
    """Recompute path costs and compare with the stored ones."""
    from .model import pts_step_weight

    j_pre = sum(
        pts_step_weight(team, plan.prefix[k][0], plan.prefix[k + 1][0])
        for k in range(len(plan.prefix) - 1)
    )
    cycle = list(plan.suffix) + [plan.suffix[0]]
    j_suf = sum(
        pts_step_weight(team, cycle[k][0], cycle[k + 1][0])
        for k in range(len(cycle) - 1)
    )
    return abs(j_pre - plan.j_pre) <= tol and abs(j_suf - plan.j_suf) <= tol
