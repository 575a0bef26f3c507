"""Shared read-only state for tree construction.

Bundles the team, the pruned automaton, its hop distances, compiled
guards keyed by team position, and the memoized shortest-path tables.
Everything here is immutable after construction and safe to share
across concurrently built trees.
"""

from __future__ import annotations

from typing import Optional, Sequence

from ..automaton import DistanceMatrix, Nba, distance_matrix, prune_infeasible
from ..errors import ModelError
from ..model import PathCache, Wts, validate_team


class CompiledGuard:
    """Guard evaluated directly on team-state tuples."""

    __slots__ = ("conjuncts",)

    def __init__(self, conjuncts):
        self.conjuncts = conjuncts  # list of (pos, neg) with (robot_index, region)

    def sat(self, pts) -> bool:
        for pos, neg in self.conjuncts:
            ok = True
            for i, r in pos:
                if pts[i] != r:
                    ok = False
                    break
            if ok:
                for i, r in neg:
                    if pts[i] == r:
                        ok = False
                        break
            if ok:
                return True
        return False


class PlannerContext:
    def __init__(self, team: Sequence[Wts], nba: Nba):
        validate_team(team)
        if not nba.pruned:
            nba = prune_infeasible(nba, len(team))
        self.team = list(team)
        self.n_robots = len(team)
        self.nba = nba
        self.dm: DistanceMatrix = distance_matrix(nba)
        self.paths = PathCache(team)
        self.succ = [wts._succ for wts in team]
        self.pred = [wts._pred for wts in team]
        self.weights = [wts._weight for wts in team]

        index_of_robot = {wts.robot_id: i for i, wts in enumerate(team)}
        self.guards: dict = {}
        for key, g in nba.feasible_transitions.items():
            compiled = []
            for c in g.dnf:
                pos = tuple((index_of_robot[rb], rg) for rb, rg in c.pos)
                neg = tuple((index_of_robot[rb], rg) for rb, rg in c.neg)
                compiled.append((pos, neg))
            self.guards[key] = CompiledGuard(compiled)
        # per automaton state: feasible successor list in declaration order
        self.feas_succ = {q: list(nba.feasible_successors(q)) for q in nba.states}
        self._lmaps: dict = {}

    def guard(self, src, dst) -> Optional[CompiledGuard]:
        return self.guards.get((src, dst))

    def pts_edge_ok(self, pts_from, pts_to) -> bool:
        for i in range(self.n_robots):
            if (pts_from[i], pts_to[i]) not in self.weights[i]:
                return False
        return True

    def pts_weight(self, pts_from, pts_to) -> float:
        total = 0.0
        for i in range(self.n_robots):
            total += self.weights[i][(pts_from[i], pts_to[i])]
        return total

    def lmap(self, q_b_min, q_b_decr) -> tuple:
        """Per-team-position target regions for the fixed symbol of a pair.

        Positions without a positive literal get None. Memoized; the
        symbol choice is stable (first feasible conjunct).
        """
        key = (q_b_min, q_b_decr)
        cached = self._lmaps.get(key)
        if cached is None:
            guard = self.guards.get(key)
            if guard is None or not guard.conjuncts:
                raise RuntimeError(f"no feasible conjunct on {key!r}")
            targets = [None] * self.n_robots
            for i, r in guard.conjuncts[0][0]:
                targets[i] = r
            cached = tuple(targets)
            self._lmaps[key] = cached
        return cached
