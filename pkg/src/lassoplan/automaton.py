"""Task automata over robot-region atomic propositions.

The task is given as a nondeterministic automaton with acceptance by
infinitely repeated visits to a final state. Transition guards are kept
symbolic, as disjunctions of conjuncts over (robot, region) literals;
the alphabet is never enumerated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import AutomatonParseError

INF = float("inf")


@dataclass(frozen=True)
class Conjunct:
    """One conjunction of literals: all of pos true and all of neg false.

    Literals are (robot_id, region) pairs. An empty conjunct is true.
    """

    pos: tuple
    neg: tuple

    def sat(self, label: set) -> bool:
        return all(a in label for a in self.pos) and not any(a in label for a in self.neg)

    def key(self) -> tuple:
        return (frozenset(self.pos), frozenset(self.neg))


@dataclass(frozen=True)
class Guard:
    """Disjunction of conjuncts. Empty disjunction is unsatisfiable."""

    dnf: tuple  # of Conjunct

    @staticmethod
    def true() -> "Guard":
        return Guard(dnf=(Conjunct((), ()),))

    @staticmethod
    def false() -> "Guard":
        return Guard(dnf=())

    def is_false(self) -> bool:
        return not self.dnf


def guard_sat(g: Guard, label: set) -> bool:
    """Whether some conjunct of g is satisfied by the label."""
    return any(c.sat(label) for c in g.dnf)


def normalize_guard(conjuncts: Iterable[Conjunct]) -> Guard:
    """Drop contradictory conjuncts (pos meets neg) and duplicates.

    First-occurrence order is preserved; a stable order matters because
    the sampler always picks the first feasible conjunct of a guard.
    """
    out = []
    seen = set()
    for c in conjuncts:
        if set(c.pos) & set(c.neg):
            continue
        k = c.key()
        if k in seen:
            continue
        seen.add(k)
        out.append(c)
    return Guard(dnf=tuple(out))


@dataclass(frozen=True)
class Nba:
    """Automaton with symbolic guards and, after pruning, their feasible parts.

    transitions maps (src, dst) to a Guard. feasible_transitions is the
    conjunct-wise restriction to guards a robot team can actually
    generate; it is empty until prune_infeasible produces it.
    """

    states: tuple
    initial: tuple
    finals: tuple
    transitions: dict
    feasible_transitions: dict = field(default_factory=dict)
    pruned: bool = False
    _succ: dict = field(default_factory=dict, repr=False, compare=False)
    _feas_succ: dict = field(default_factory=dict, repr=False, compare=False)
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        state_set = set(self.states)
        if len(state_set) != len(self.states):
            raise AutomatonParseError("duplicate automaton states")
        for q in self.initial:
            if q not in state_set:
                raise AutomatonParseError(f"initial state {q!r} not among states")
        for q in self.finals:
            if q not in state_set:
                raise AutomatonParseError(f"final state {q!r} not among states")
        succ: dict = {q: [] for q in self.states}
        for (src, dst) in self.transitions:
            if src not in state_set or dst not in state_set:
                raise AutomatonParseError(f"dangling transition endpoint {(src, dst)!r}")
            succ[src].append(dst)
        feas_succ: dict = {q: [] for q in self.states}
        for (src, dst), g in self.feasible_transitions.items():
            if not g.is_false():
                feas_succ[src].append(dst)
        object.__setattr__(self, "_succ", succ)
        object.__setattr__(self, "_feas_succ", feas_succ)
        object.__setattr__(self, "_index", {q: i for i, q in enumerate(self.states)})

    def successors(self, q) -> list:
        return self._succ[q]

    def feasible_successors(self, q) -> list:
        return self._feas_succ[q]

    def state_order(self, q) -> int:
        return self._index[q]


# ---------------------------------------------------------------------------
# parsing / serialization

def _parse_literals(raw, where: str) -> tuple:
    if not isinstance(raw, list):
        raise AutomatonParseError("literal list expected", where)
    out = []
    for k, item in enumerate(raw):
        if (
            not isinstance(item, (list, tuple))
            or len(item) != 2
            or not isinstance(item[0], int)
        ):
            raise AutomatonParseError(
                f"literal must be [robot, region], got {item!r}", f"{where}[{k}]"
            )
        out.append((item[0], item[1]))
    return tuple(out)


def _parse_guard(raw, where: str) -> Guard:
    if raw == "true":
        return Guard.true()
    if not isinstance(raw, dict) or "dnf" not in raw:
        raise AutomatonParseError('guard must be "true" or {"dnf": [...]}', where)
    conjuncts = []
    if not isinstance(raw["dnf"], list):
        raise AutomatonParseError("dnf must be a list of conjuncts", where)
    for k, c in enumerate(raw["dnf"]):
        if not isinstance(c, dict):
            raise AutomatonParseError("conjunct must be an object", f"{where}.dnf[{k}]")
        pos = _parse_literals(c.get("pos", []), f"{where}.dnf[{k}].pos")
        neg = _parse_literals(c.get("neg", []), f"{where}.dnf[{k}].neg")
        conjuncts.append(Conjunct(pos=pos, neg=neg))
    return normalize_guard(conjuncts)


def parse_nba(doc: dict) -> Nba:
    """Build an automaton from its JSON document. Guards are normalized."""
    for key in ("states", "initial", "finals", "transitions"):
        if key not in doc:
            raise AutomatonParseError(f"missing key {key!r}", "document")
    transitions: dict = {}
    for k, t in enumerate(doc["transitions"]):
        where = f"transitions[{k}]"
        if not isinstance(t, dict) or "from" not in t or "to" not in t:
            raise AutomatonParseError("transition needs from/to/guard", where)
        key = (t["from"], t["to"])
        g = _parse_guard(t.get("guard", "true"), f"{where}.guard")
        if key in transitions:
            # merge parallel transition declarations into one guard
            g = normalize_guard(transitions[key].dnf + g.dnf)
        transitions[key] = g
    return Nba(
        states=tuple(doc["states"]),
        initial=tuple(doc["initial"]),
        finals=tuple(doc["finals"]),
        transitions=transitions,
    )


def guard_to_json(g: Guard):
    return {
        "dnf": [
            {"pos": [list(a) for a in c.pos], "neg": [list(a) for a in c.neg]}
            for c in g.dnf
        ]
    }


def nba_to_json(nba: Nba) -> dict:
    return {
        "states": list(nba.states),
        "initial": list(nba.initial),
        "finals": list(nba.finals),
        "transitions": [
            {"from": src, "to": dst, "guard": guard_to_json(g)}
            for (src, dst), g in nba.transitions.items()
        ],
    }


def load_nba_file(path) -> Nba:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise AutomatonParseError(str(exc), str(path)) from exc
    return parse_nba(doc)


# ---------------------------------------------------------------------------
# feasibility pruning

def conjunct_is_feasible(c: Conjunct) -> bool:
    """A team can generate a conjunct unless it puts one robot in two regions.

    Checked structurally on the positive literals; negative literals never
    force presence, so they cannot make a conjunct infeasible.
    """
    required: dict = {}
    for robot, region in c.pos:
        seen = required.get(robot)
        if seen is None:
            required[robot] = region
        elif seen != region:
            return False
    return True


def prune_infeasible(nba: Nba, n_robots: int) -> Nba:
    """Restrict every guard to its feasible conjuncts.

    Transitions whose guard loses all conjuncts are dropped from the
    feasible relation entirely. Guards may only mention robots 1..n_robots.
    """
    feasible: dict = {}
    for key, g in nba.transitions.items():
        for c in g.dnf:
            for robot, _ in c.pos + c.neg:
                if not 1 <= robot <= n_robots:
                    raise AutomatonParseError(
                        f"guard on {key!r} references robot {robot}, team has {n_robots}"
                    )
        kept = tuple(c for c in g.dnf if conjunct_is_feasible(c))
        if kept:
            feasible[key] = Guard(dnf=kept)
    return Nba(
        states=nba.states,
        initial=nba.initial,
        finals=nba.finals,
        transitions=nba.transitions,
        feasible_transitions=feasible,
        pruned=True,
    )


# ---------------------------------------------------------------------------
# hop distances on the pruned graph

class DistanceMatrix:
    """All-pairs hop distances over feasible transitions.

    d(q, q') counts edges of a shortest path, with d(q, q) = 0. The
    separate cycle distance dcyc(q) is the length of a shortest closed
    walk through q (at least 1), infinite when no such walk exists.
    """

    def __init__(self, dist: dict, dcyc: dict, states: tuple):
        self._dist = dist
        self._dcyc = dcyc
        self.states = states

    def d(self, src, dst) -> float:
        if src == dst:
            return 0.0
        return self._dist.get((src, dst), INF)

    def dcyc(self, q) -> float:
        return self._dcyc.get(q, INF)


def distance_matrix(nba: Nba) -> DistanceMatrix:
    """Unit-weight BFS distances on the pruned graph, plus cycle distances."""
    if not nba.pruned:
        raise AutomatonParseError("distance matrix needs a pruned automaton")
    dist: dict = {}
    for src in nba.states:
        frontier = [src]
        level = 0
        seen = {src}
        while frontier:
            level += 1
            nxt = []
            for q in frontier:
                for q2 in nba.feasible_successors(q):
                    if q2 not in seen:
                        seen.add(q2)
                        dist[(src, q2)] = level
                        nxt.append(q2)
            frontier = nxt
    dcyc: dict = {}
    for q in nba.states:
        best = INF
        for s in nba.feasible_successors(q):
            back = 0.0 if s == q else dist.get((s, q), INF)
            if 1 + back < best:
                best = 1 + back
        if best < INF:
            dcyc[q] = int(best)
    return DistanceMatrix(dist, dcyc, nba.states)


def feasible_finals(nba: Nba, dm: DistanceMatrix, q_b0) -> list:
    """Final states reachable from q_b0 that admit a feasible closed walk.

    Returned in declaration order. An empty list means no prefix-suffix
    plan exists for this initial state.
    """
    if q_b0 not in nba.initial:
        raise AutomatonParseError(f"{q_b0!r} is not an initial state")
    out = []
    for f in nba.finals:
        if dm.d(q_b0, f) < INF and dm.dcyc(f) < INF:
            out.append(f)
    return out


def pick_symbol(nba: Nba, q_b_min, q_b_decr) -> dict:
    """Per-robot target regions enabling the q_b_min -> q_b_decr transition.

    Deterministically uses the first feasible conjunct of the guard, so
    repeated queries for the same pair give the same symbol. Negative
    literals constrain transitions but never become targets.
    """
    g = nba.feasible_transitions.get((q_b_min, q_b_decr))
    if g is None or g.is_false():
        raise RuntimeError(
            f"no feasible conjunct on {(q_b_min, q_b_decr)!r}; pruning missing?"
        )
    c = g.dnf[0]
    return {robot: region for robot, region in c.pos}
