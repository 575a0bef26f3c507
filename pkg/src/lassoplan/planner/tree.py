"""Rooted tree approximating the product of team motion and task automaton.

Nodes are (team state, automaton state) pairs. Each node keeps its
parent, the weight of the edge from the parent, and its cost to the
root. The frontier set holds the nodes whose automaton component is
nearest the current bias target in pruned-automaton hops.
"""

from __future__ import annotations

from itertools import product as iproduct
from typing import Optional

from .context import PlannerContext

INF = float("inf")


class Tree:
    def __init__(self, ctx: PlannerContext, root_pts: tuple, root_buchi, mode: str,
                 target=None):
        self.ctx = ctx
        self.mode = mode  # "prefix" | "suffix"
        self.root_pts = root_pts
        self.root_buchi = root_buchi

        self.pts = [root_pts]
        self.buchi = [root_buchi]
        self.parent = [-1]
        self.edge_w = [0.0]
        self.cost = [0.0]
        self.children = [set()]
        self.by_key = {(root_pts, root_buchi): 0}
        self._last_rewire_cost = [INF]

        # nodes grouped by the first two team positions, for candidate search
        self._plen = min(2, ctx.n_robots)
        self.buckets = {root_pts[: self._plen]: [0]}

        self.target = target
        self.dval = [self._d(root_buchi)]
        self.d_min = self.dval[0]
        self.dmin_nodes = [0]
        self.rest: list = []

    def __len__(self) -> int:
        return len(self.pts)

    def _d(self, b) -> float:
        if self.target is None:
            return 0.0
        return self.ctx.dm.d(b, self.target)

    def contains(self, pts: tuple, b) -> bool:
        return (pts, b) in self.by_key

    def node_state(self, i: int) -> tuple:
        return (self.pts[i], self.buchi[i])

    # -- frontier ----------------------------------------------------------

    def set_target(self, target) -> None:
        """Re-point the bias target and rebuild the frontier."""
        self.target = target
        self.dval = [self._d(b) for b in self.buchi]
        self.d_min = min(self.dval)
        self.dmin_nodes = [i for i, d in enumerate(self.dval) if d == self.d_min]
        self.rest = [i for i, d in enumerate(self.dval) if d != self.d_min]

    def _frontier_add(self, idx: int, d: float) -> None:
        if d < self.d_min:
            self.rest.extend(self.dmin_nodes)
            self.dmin_nodes = [idx]
            self.d_min = d
        elif d == self.d_min:
            self.dmin_nodes.append(idx)
        else:
            self.rest.append(idx)

    # -- candidate enumeration --------------------------------------------

    def _candidates(self, pts: tuple, into: bool) -> list:
        """Node indices adjacent to pts componentwise, in increasing order.

        With into=True, nodes that can move into pts (parent candidates);
        otherwise nodes pts can move into (rewire candidates). Uses
        bucket enumeration over the first team positions when cheap,
        otherwise a full scan with early rejection.
        """
        ctx = self.ctx
        n = ctx.n_robots
        weights = ctx.weights
        adj = ctx.pred if into else ctx.succ
        per_robot = [adj[i][pts[i]] for i in range(n)]
        plen = self._plen
        combos = 1
        for lst in per_robot[:plen]:
            combos *= len(lst)
        out = []
        if combos <= 16 + len(self.pts):
            for prefix in iproduct(*per_robot[:plen]):
                nodes = self.buckets.get(prefix)
                if not nodes:
                    continue
                for i in nodes:
                    np = self.pts[i]
                    ok = True
                    for k in range(plen, n):
                        edge = (np[k], pts[k]) if into else (pts[k], np[k])
                        if edge not in weights[k]:
                            ok = False
                            break
                    if ok:
                        out.append(i)
            out.sort()
        else:
            for i, np in enumerate(self.pts):
                ok = True
                for k in range(n):
                    edge = (np[k], pts[k]) if into else (pts[k], np[k])
                    if edge not in weights[k]:
                        ok = False
                        break
                if ok:
                    out.append(i)
        return out

    def parents_for(self, new_pts: tuple) -> list:
        """Sorted (node index, step weight) pairs that can move to new_pts."""
        cands = self._candidates(new_pts, into=True)
        w = self.ctx.pts_weight
        return [(i, w(self.pts[i], new_pts)) for i in cands]

    # -- growth -------------------------------------------------------------

    def extend(self, new_pts: tuple, b, parents_raw: list) -> Optional[int]:
        """Attach (new_pts, b) to its cheapest valid parent, if any.

        parents_raw lists componentwise-compatible nodes; validity also
        needs the automaton transition from the parent's state to b to be
        enabled at the parent's label. Ties break on the lowest index.
        """
        key = (new_pts, b)
        if key in self.by_key:
            raise ValueError(f"node {key!r} already in tree")
        guard_of = self.ctx.guard
        best = -1
        best_cost = INF
        for i, w in parents_raw:
            g = guard_of(self.buchi[i], b)
            if g is not None and g.sat(self.pts[i]):
                c = self.cost[i] + w
                if c < best_cost:
                    best_cost = c
                    best = i
        if best < 0:
            return None
        idx = len(self.pts)
        self.pts.append(new_pts)
        self.buchi.append(b)
        self.parent.append(best)
        self.edge_w.append(best_cost - self.cost[best])
        self.cost.append(best_cost)
        self.children.append(set())
        self.children[best].add(idx)
        self.by_key[key] = idx
        self._last_rewire_cost.append(INF)
        self.buckets.setdefault(new_pts[: self._plen], []).append(idx)
        d = self._d(b)
        self.dval.append(d)
        self._frontier_add(idx, d)
        return idx

    def rewire(self, x: int) -> bool:
        """Reparent onto x every node it now reaches more cheaply.

        Skips the scan when x's cost has not changed since its last
        rewire pass: extension always picks the cheapest parent and
        costs only ever decrease, so no node can have become improvable
        through x in the meantime.
        """
        if self.cost[x] == self._last_rewire_cost[x]:
            return False
        self._last_rewire_cost[x] = self.cost[x]
        ctx = self.ctx
        x_pts = self.pts[x]
        x_b = self.buchi[x]
        x_cost = self.cost[x]
        changed = False
        for v in self._candidates(x_pts, into=False):
            if v == 0 or v == x:
                continue
            g = ctx.guard(x_b, self.buchi[v])
            if g is None or not g.sat(x_pts):
                continue
            w = ctx.pts_weight(x_pts, self.pts[v])
            if x_cost + w < self.cost[v]:
                self._reparent(v, x, w)
                changed = True
        return changed

    def _reparent(self, v: int, new_parent: int, w: float) -> None:
        self.children[self.parent[v]].discard(v)
        self.parent[v] = new_parent
        self.edge_w[v] = w
        self.children[new_parent].add(v)
        stack = [v]
        while stack:
            u = stack.pop()
            self.cost[u] = self.cost[self.parent[u]] + self.edge_w[u]
            stack.extend(self.children[u])

    # -- queries ------------------------------------------------------------

    def find_path(self, idx: int) -> list:
        """Root-to-node sequence of (team state, automaton state) pairs."""
        if not 0 <= idx < len(self.pts):
            raise ValueError(f"unknown node {idx}")
        path = []
        while idx != -1:
            path.append((self.pts[idx], self.buchi[idx]))
            idx = self.parent[idx]
        path.reverse()
        return path

    def recomputed_costs(self) -> list:
        """Root-path weight sums, independent of the incremental cost field."""
        out = [0.0] * len(self.pts)
        order = sorted(range(len(self.pts)), key=lambda i: len(self.find_path(i)))
        for i in order:
            p = self.parent[i]
            if p != -1:
                out[i] = out[p] + self.ctx.pts_weight(self.pts[p], self.pts[i])
        return out
