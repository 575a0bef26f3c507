"""Robot mobility models.

A robot moves on a weighted directed graph whose vertices are workspace
regions. A team is a list of such graphs, one per robot; team states are
tuples with one region per robot and team moves are componentwise edges.
"""

from __future__ import annotations

import json
import random
import threading
from dataclasses import dataclass, field
from heapq import heappop, heappush
from typing import Callable, Iterable, Optional, Sequence, Union

from .errors import ModelError, NotATransitionError

Region = Union[int, str]
TeamState = tuple  # one region per robot, in team order


@dataclass(frozen=True)
class Wts:
    """One robot's weighted transition system.

    States are region ids (all ints or all strings within one system).
    Edges are directed and carry a nonnegative travel cost. A state
    satisfies exactly one atomic proposition: (robot_id, region).
    """

    robot_id: int
    states: tuple
    initial: Region
    edges: tuple  # of (src, dst, weight)
    _succ: dict = field(default_factory=dict, repr=False, compare=False)
    _pred: dict = field(default_factory=dict, repr=False, compare=False)
    _weight: dict = field(default_factory=dict, repr=False, compare=False)
    _order: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        states = tuple(self.states)
        object.__setattr__(self, "states", states)
        if not states:
            raise ModelError("a transition system needs at least one state")
        if len(set(states)) != len(states):
            raise ModelError("duplicate state ids")
        kinds = {type(s) for s in states}
        if len(kinds) > 1:
            raise ModelError("state ids must be all ints or all strings")
        state_set = set(states)
        if self.initial not in state_set:
            raise ModelError(f"initial state {self.initial!r} not among states")
        succ: dict = {s: [] for s in states}
        pred: dict = {s: [] for s in states}
        weight: dict = {}
        for k, (src, dst, w) in enumerate(self.edges):
            if src not in state_set or dst not in state_set:
                raise ModelError(f"edge {k} endpoint not among states: {(src, dst)}")
            if w < 0:
                raise ModelError(f"edge {k} has negative weight {w}")
            if (src, dst) in weight:
                raise ModelError(f"duplicate edge {(src, dst)}")
            weight[(src, dst)] = float(w)
            succ[src].append(dst)
            pred[dst].append(src)
        object.__setattr__(self, "edges", tuple((s, d, float(w)) for s, d, w in self.edges))
        object.__setattr__(self, "_succ", succ)
        object.__setattr__(self, "_pred", pred)
        object.__setattr__(self, "_weight", weight)
        # rank used for deterministic tie-breaking, lowest region id first
        object.__setattr__(self, "_order", {s: i for i, s in enumerate(sorted(states))})

    def successors(self, q: Region) -> list:
        try:
            return self._succ[q]
        except KeyError:
            raise ModelError(f"unknown state {q!r}") from None

    def predecessors(self, q: Region) -> list:
        try:
            return self._pred[q]
        except KeyError:
            raise ModelError(f"unknown state {q!r}") from None

    def weight(self, src: Region, dst: Region) -> float:
        return self._weight[(src, dst)]

    def has_edge(self, src: Region, dst: Region) -> bool:
        return (src, dst) in self._weight

    def has_self_loop(self, q: Region) -> bool:
        return (q, q) in self._weight


def reachable_set(wts: Wts, q: Region) -> set:
    """One-hop successor set of q; contains q itself iff q has a self-loop."""
    return set(wts.successors(q))


def shortest_path(wts: Wts, frm: Region, to: Region) -> Optional[list]:
    """Minimum-total-weight path from frm to to, or None if unreachable.

    Ties are broken by expanding the lowest region id first, so the
    returned path is deterministic for a given system.
    """
    if frm not in wts._succ:
        raise ModelError(f"unknown state {frm!r}")
    if to not in wts._succ:
        raise ModelError(f"unknown state {to!r}")
    if frm == to:
        return [frm]
    order = wts._order
    dist = {frm: 0.0}
    parent: dict = {}
    heap = [(0.0, order[frm], frm)]
    done = set()
    while heap:
        d, _, u = heappop(heap)
        if u in done:
            continue
        if u == to:
            path = [u]
            while u != frm:
                u = parent[u]
                path.append(u)
            path.reverse()
            return path
        done.add(u)
        for v in wts._succ[u]:
            if v in done:
                continue
            nd = d + wts._weight[(u, v)]
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                heappush(heap, (nd, order[v], v))
    return None


def pts_step_weight(team: Sequence[Wts], q: TeamState, q2: TeamState) -> float:
    """Cost of a synchronous team move: the sum of per-robot edge weights."""
    total = 0.0
    for i, wts in enumerate(team):
        key = (q[i], q2[i])
        w = wts._weight.get(key)
        if w is None:
            raise NotATransitionError(
                f"robot {wts.robot_id} has no edge {q[i]!r} -> {q2[i]!r}"
            )
        total += w
    return total


def team_label(team: Sequence[Wts], q: TeamState) -> set:
    """Atomic propositions true at a team state: one (robot_id, region) per robot."""
    return {(wts.robot_id, q[i]) for i, wts in enumerate(team)}


def team_initial(team: Sequence[Wts]) -> TeamState:
    return tuple(wts.initial for wts in team)


def validate_team(team: Sequence[Wts]) -> None:
    """Robots must be numbered 1..N in list order."""
    for i, wts in enumerate(team):
        if wts.robot_id != i + 1:
            raise ModelError(
                f"team robot ids must be 1..N in order; position {i} has id {wts.robot_id}"
            )


# ---------------------------------------------------------------------------
# instance generators

def generate_grid(
    rows: int,
    cols: int,
    with_self_loops: bool = True,
    weight_model: Union[float, Callable[[Region, Region], float]] = 1.0,
    robot_id: int = 1,
    initial: Optional[Region] = None,
) -> Wts:
    """4-connected grid with row-major integer region ids.

    Self-loops, when requested, have unit weight. Move weights come from
    weight_model (a constant or a callable of the edge endpoints).
    """
    if rows < 1 or cols < 1:
        raise ModelError("rows and cols must be >= 1")
    n = rows * cols
    states = list(range(n))

    def w(src: Region, dst: Region) -> float:
        if callable(weight_model):
            return float(weight_model(src, dst))
        return float(weight_model)

    edges = []
    for r in range(rows):
        for c in range(cols):
            s = r * cols + c
            if c + 1 < cols:
                edges.append((s, s + 1, w(s, s + 1)))
                edges.append((s + 1, s, w(s + 1, s)))
            if r + 1 < rows:
                edges.append((s, s + cols, w(s, s + cols)))
                edges.append((s + cols, s, w(s + cols, s)))
    if with_self_loops:
        for s in states:
            edges.append((s, s, 1.0))
    return Wts(
        robot_id=robot_id,
        states=tuple(states),
        initial=states[0] if initial is None else initial,
        edges=tuple(edges),
    )


def generate_random_wts(
    n_states: int,
    avg_degree: float,
    seed: int,
    weight_range: tuple = (1.0, 10.0),
    robot_id: int = 1,
    self_loop_weight: float = 0.0,
    initial: Optional[Region] = None,
) -> Wts:
    """Strongly connected random digraph with the requested average out-degree.

    Strong connectivity comes from a random Hamiltonian cycle backbone.
    Every state gets a self-loop (a stopping action); by default waiting
    costs nothing. Deterministic for a fixed seed.
    """
    if n_states < 1:
        raise ModelError("n_states must be >= 1")
    if avg_degree < 1:
        raise ModelError("avg_degree must be >= 1")
    if avg_degree > n_states:
        raise ModelError(f"avg_degree {avg_degree} infeasible for {n_states} states")
    rng = random.Random(seed)
    states = list(range(n_states))
    lo, hi = weight_range

    edge_set = set()
    edges = []

    def add(src, dst, w):
        edge_set.add((src, dst))
        edges.append((src, dst, w))

    for s in states:
        add(s, s, float(self_loop_weight))
    if n_states > 1:
        backbone = states[:]
        rng.shuffle(backbone)
        for k in range(n_states):
            src = backbone[k]
            dst = backbone[(k + 1) % n_states]
            if (src, dst) not in edge_set:
                add(src, dst, rng.uniform(lo, hi))

    target_total = int(round(avg_degree * n_states))
    # cap at the complete digraph with self-loops
    target_total = min(target_total, n_states * n_states)
    attempts = 0
    while len(edges) < target_total and attempts < 50 * target_total:
        attempts += 1
        src = rng.randrange(n_states)
        dst = rng.randrange(n_states)
        if (src, dst) in edge_set:
            continue
        add(src, dst, rng.uniform(lo, hi))

    return Wts(
        robot_id=robot_id,
        states=tuple(states),
        initial=states[0] if initial is None else initial,
        edges=tuple(edges),
    )


# ---------------------------------------------------------------------------
# serialization

def wts_to_json(wts: Wts) -> dict:
    return {
        "robot": wts.robot_id,
        "states": list(wts.states),
        "initial": wts.initial,
        "edges": [[s, d, w] for s, d, w in wts.edges],
    }


def wts_from_json(doc: dict) -> Wts:
    try:
        return Wts(
            robot_id=int(doc["robot"]),
            states=tuple(doc["states"]),
            initial=doc["initial"],
            edges=tuple((s, d, float(w)) for s, d, w in doc["edges"]),
        )
    except (KeyError, TypeError) as exc:
        raise ModelError(f"malformed transition-system document: {exc}") from exc


def dump_wts(wts: Wts) -> str:
    return json.dumps(wts_to_json(wts), separators=(",", ":"))


def load_wts_file(path) -> Wts:
    with open(path) as fh:
        return wts_from_json(json.load(fh))


# ---------------------------------------------------------------------------
# shortest-path service used by the sampler

class PathCache:
    """Memoized next-hop tables toward bias target regions.

    For each (robot, target) pair a single Dijkstra run on the reversed
    graph yields, for every source, the distance to the target and the
    second state of a shortest source-to-target path. Safe for concurrent
    readers; inserts are serialized by a lock.
    """

    def __init__(self, team: Sequence[Wts]):
        self._team = list(team)
        self._tables: dict = {}
        self._lock = threading.Lock()

    def _build(self, robot_index: int, target: Region) -> tuple:
        wts = self._team[robot_index]
        if target not in wts._succ:
            raise ModelError(f"unknown state {target!r}")
        order = wts._order
        dist = {target: 0.0}
        heap = [(0.0, order[target], target)]
        done = set()
        while heap:
            d, _, u = heappop(heap)
            if u in done:
                continue
            done.add(u)
            for v in wts._pred[u]:
                nd = d + wts._weight[(v, u)]
                if v not in dist or nd < dist[v]:
                    if v in done:
                        continue
                    dist[v] = nd
                    heappush(heap, (nd, order[v], v))
        # next hop: cheapest continuation, ties broken by lowest region id.
        # Self-loops are skipped: with zero-cost waits they tie the optimum
        # without progressing, and a leaving minimizer always exists.
        nxt = {}
        for u in wts.states:
            if u == target or u not in dist:
                continue
            best = None
            for v in wts._succ[u]:
                if v == u or v not in dist:
                    continue
                via = wts._weight[(u, v)] + dist[v]
                if via == dist[u] and (best is None or order[v] < order[best]):
                    best = v
            nxt[u] = best
        return dist, nxt

    def _table(self, robot_index: int, target: Region) -> tuple:
        key = (robot_index, target)
        table = self._tables.get(key)
        if table is None:
            with self._lock:
                table = self._tables.get(key)
                if table is None:
                    table = self._build(robot_index, target)
                    self._tables[key] = table
        return table

    def next_hop(self, robot_index: int, src: Region, target: Region) -> Optional[Region]:
        """Second state of a shortest src-to-target path; None if unreachable.

        When src equals target the hop is src itself via its self-loop,
        or None when no self-loop exists.
        """
        wts = self._team[robot_index]
        if src == target:
            return src if wts.has_self_loop(src) else None
        dist, nxt = self._table(robot_index, target)
        if src not in dist:
            return None
        return nxt.get(src)

    def distance(self, robot_index: int, src: Region, target: Region) -> float:
        if src == target:
            return 0.0
        dist, _ = self._table(robot_index, target)
        return dist.get(src, float("inf"))
