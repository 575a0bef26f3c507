import itertools
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import lassoplan as lp
from lassoplan.automaton import Conjunct, Guard, conjunct_is_feasible, normalize_guard
from lassoplan.errors import AutomatonParseError

from conftest import fig_recurrence_nba, random_task_nba

INF = float("inf")


# --- parsing ----------------------------------------------------------------

def test_parse_true_guard():
    nba = lp.parse_nba({
        "states": [0, 1], "initial": [0], "finals": [1],
        "transitions": [{"from": 0, "to": 1, "guard": "true"}],
    })
    g = nba.transitions[(0, 1)]
    assert len(g.dnf) == 1
    assert g.dnf[0].pos == () and g.dnf[0].neg == ()


def test_parse_two_conjunct_guard():
    doc = {
        "states": ["a"], "initial": ["a"], "finals": ["a"],
        "transitions": [{
            "from": "a", "to": "a",
            "guard": {"dnf": [
                {"pos": [[1, "r6"]], "neg": [[2, "r9"]]},
                {"pos": [[2, "r14"]], "neg": []},
            ]},
        }],
    }
    g = lp.parse_nba(doc).transitions[("a", "a")]
    assert len(g.dnf) == 2
    assert g.dnf[0].pos == ((1, "r6"),)
    assert g.dnf[0].neg == ((2, "r9"),)


def test_parse_round_trip():
    doc = fig_recurrence_nba()
    nba = lp.parse_nba(doc)
    again = lp.parse_nba(json.loads(json.dumps(lp.nba_to_json(nba))))
    assert again.states == nba.states
    assert again.initial == nba.initial
    assert again.finals == nba.finals
    assert again.transitions == nba.transitions


def test_parse_errors_carry_location():
    with pytest.raises(AutomatonParseError) as exc:
        lp.parse_nba({"states": [0], "initial": [0], "finals": [0],
                      "transitions": [{"from": 0, "to": 0, "guard": {"dnf": [{"pos": [["x", 1]]}]}}]})
    assert "transitions[0]" in str(exc.value)
    with pytest.raises(AutomatonParseError):
        lp.parse_nba({"states": [0], "initial": [1], "finals": [], "transitions": []})
    with pytest.raises(AutomatonParseError):
        lp.parse_nba({"states": [0], "initial": [0], "finals": [],
                      "transitions": [{"from": 0, "to": 3, "guard": "true"}]})


def test_normalize_drops_contradictions_and_duplicates():
    g = normalize_guard([
        Conjunct(pos=((1, 0),), neg=((1, 0),)),       # contradictory
        Conjunct(pos=((1, 1),), neg=()),
        Conjunct(pos=((1, 1),), neg=()),              # duplicate
    ])
    assert len(g.dnf) == 1


# --- guard_sat --------------------------------------------------------------

def test_guard_sat_true_guard():
    assert lp.guard_sat(Guard.true(), {(1, 0), (2, 5)})


def test_guard_sat_simple():
    g = Guard(dnf=(Conjunct(pos=((1, "r6"),), neg=()),))
    assert lp.guard_sat(g, {(1, "r6"), (2, "r3")})
    assert not lp.guard_sat(g, {(1, "r5"), (2, "r3")})


def eval_dnf_reference(dnf_doc, label):
    """Truth-table style evaluation straight off the document."""
    for c in dnf_doc:
        pos = {tuple(a) for a in c.get("pos", [])}
        neg = {tuple(a) for a in c.get("neg", [])}
        if pos <= label and not (neg & label):
            return True
    return False


def test_guard_sat_exhaustive_truth_table():
    regions = [0, 1, 2, 3]
    rng = random.Random(5)
    for _ in range(20):
        dnf_doc = []
        for _ in range(rng.randrange(1, 4)):
            pos = [[rb, rng.choice(regions)] for rb in (1, 2) if rng.random() < 0.5]
            neg = [[rb, rng.choice(regions)] for rb in (1, 2) if rng.random() < 0.3]
            dnf_doc.append({"pos": pos, "neg": neg})
        doc = {"states": [0], "initial": [0], "finals": [0],
               "transitions": [{"from": 0, "to": 0, "guard": {"dnf": dnf_doc}}]}
        g = lp.parse_nba(doc).transitions[(0, 0)]
        for r1, r2 in itertools.product(regions, regions):
            label = {(1, r1), (2, r2)}
            assert lp.guard_sat(g, label) == eval_dnf_reference(dnf_doc, label)


# --- pruning ----------------------------------------------------------------

def test_prune_removes_same_robot_two_regions():
    doc = {"states": [0, 1], "initial": [0], "finals": [1],
           "transitions": [{"from": 0, "to": 1,
                            "guard": {"dnf": [{"pos": [[1, "rj"], [1, "re"]], "neg": []}]}}]}
    pruned = lp.prune_infeasible(lp.parse_nba(doc), n_robots=1)
    assert (0, 1) not in pruned.feasible_transitions


def test_prune_keeps_different_robots_same_region():
    doc = {"states": [0, 1], "initial": [0], "finals": [1],
           "transitions": [{"from": 0, "to": 1,
                            "guard": {"dnf": [{"pos": [[1, "rj"], [2, "rj"]], "neg": []}]}}]}
    pruned = lp.prune_infeasible(lp.parse_nba(doc), n_robots=2)
    assert (0, 1) in pruned.feasible_transitions


def test_prune_recurrence_automaton(recurrence_nba):
    pruned = lp.prune_infeasible(recurrence_nba, n_robots=1)
    assert (0, 2) not in pruned.feasible_transitions
    assert (2, 2) not in pruned.feasible_transitions
    assert (0, 1) in pruned.feasible_transitions
    assert (1, 2) in pruned.feasible_transitions


def test_prune_rejects_unknown_robot():
    doc = {"states": [0], "initial": [0], "finals": [0],
           "transitions": [{"from": 0, "to": 0,
                            "guard": {"dnf": [{"pos": [[3, 0]], "neg": []}]}}]}
    with pytest.raises(AutomatonParseError):
        lp.prune_infeasible(lp.parse_nba(doc), n_robots=2)


atom_st = st.tuples(st.integers(min_value=1, max_value=3),
                    st.integers(min_value=0, max_value=4))
conjunct_st = st.builds(
    Conjunct,
    pos=st.lists(atom_st, max_size=4).map(tuple),
    neg=st.lists(atom_st, max_size=2).map(tuple),
)


@given(st.lists(conjunct_st, min_size=1, max_size=6))
@settings(max_examples=200, deadline=None)
def test_pruning_soundness_property(conjuncts):
    """Kept iff no robot needs two distinct regions at once."""
    guard = normalize_guard(conjuncts)
    doc = {"states": [0, 1], "initial": [0], "finals": [1], "transitions": []}
    nba = lp.Nba(states=(0, 1), initial=(0,), finals=(1,),
                 transitions={(0, 1): guard})
    pruned = lp.prune_infeasible(nba, n_robots=3)
    kept = pruned.feasible_transitions.get((0, 1), Guard.false()).dnf
    for c in guard.dnf:
        by_robot = {}
        two_regions = False
        for rb, rg in c.pos:
            if by_robot.setdefault(rb, rg) != rg:
                two_regions = True
        assert (c in kept) == (not two_regions)
        assert conjunct_is_feasible(c) == (not two_regions)


@given(st.lists(conjunct_st, min_size=1, max_size=6),
       st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4)))
@settings(max_examples=200, deadline=None)
def test_pruned_sat_implies_original_sat(conjuncts, regions):
    guard = normalize_guard(conjuncts)
    nba = lp.Nba(states=(0, 1), initial=(0,), finals=(1,),
                 transitions={(0, 1): guard})
    pruned_g = lp.prune_infeasible(nba, n_robots=3).feasible_transitions.get(
        (0, 1), Guard.false())
    label = {(i + 1, regions[i]) for i in range(3)}
    if lp.guard_sat(pruned_g, label):
        assert lp.guard_sat(guard, label)
    # on one-region-per-robot labels pruning loses nothing
    assert lp.guard_sat(pruned_g, label) == lp.guard_sat(guard, label)


# --- distance matrix ---------------------------------------------------------

def floyd_warshall(states, edges):
    d = {(a, b): INF for a in states for b in states}
    for a in states:
        d[(a, a)] = 0
    for a, b in edges:
        if a != b:
            d[(a, b)] = min(d[(a, b)], 1)
    for k in states:
        for i in states:
            for j in states:
                if d[(i, k)] + d[(k, j)] < d[(i, j)]:
                    d[(i, j)] = d[(i, k)] + d[(k, j)]
    return d


def test_distance_chain():
    doc = {"states": [0, 1, 2], "initial": [0], "finals": [2],
           "transitions": [{"from": 0, "to": 1, "guard": "true"},
                           {"from": 1, "to": 2, "guard": "true"}]}
    nba = lp.prune_infeasible(lp.parse_nba(doc), 1)
    dm = lp.distance_matrix(nba)
    assert dm.d(0, 2) == 2
    assert dm.d(0, 0) == 0
    assert dm.dcyc(0) == INF


def test_distance_self_loop_cycle():
    doc = {"states": [0], "initial": [0], "finals": [0],
           "transitions": [{"from": 0, "to": 0, "guard": "true"}]}
    dm = lp.distance_matrix(lp.prune_infeasible(lp.parse_nba(doc), 1))
    assert dm.dcyc(0) == 1


def test_distance_requires_pruning(recurrence_nba):
    with pytest.raises(AutomatonParseError):
        lp.distance_matrix(recurrence_nba)


def test_distance_matrix_against_floyd_warshall():
    rng = random.Random(77)
    for trial in range(25):
        n = rng.randrange(3, 20)
        regions = {1: list(range(6))}
        nba = lp.prune_infeasible(
            lp.parse_nba(random_task_nba(rng, n, regions)), 1)
        dm = lp.distance_matrix(nba)
        edges = [k for k, g in nba.feasible_transitions.items() if not g.is_false()]
        ref = floyd_warshall(nba.states, edges)
        for a in nba.states:
            for b in nba.states:
                assert dm.d(a, b) == ref[(a, b)]
        # cycle distance: shortest closed walk via any successor
        for q in nba.states:
            succ = [b for (a, b) in edges if a == q]
            expect = min((1 + (0 if s == q else ref[(s, q)]) for s in succ),
                         default=INF)
            assert dm.dcyc(q) == expect


def test_distance_triangle_inequality():
    rng = random.Random(123)
    regions = {1: list(range(5))}
    nba = lp.prune_infeasible(lp.parse_nba(random_task_nba(rng, 12, regions)), 1)
    dm = lp.distance_matrix(nba)
    for a in nba.states:
        for b in nba.states:
            for c in nba.states:
                if dm.d(a, b) < INF and dm.d(b, c) < INF:
                    assert dm.d(a, c) <= dm.d(a, b) + dm.d(b, c)


# --- feasible finals ----------------------------------------------------------

def test_feasible_finals_excludes_unreachable():
    doc = {"states": [0, 1, 2], "initial": [0], "finals": [1, 2],
           "transitions": [{"from": 0, "to": 1, "guard": "true"},
                           {"from": 1, "to": 1, "guard": "true"}]}
    nba = lp.prune_infeasible(lp.parse_nba(doc), 1)
    dm = lp.distance_matrix(nba)
    assert lp.feasible_finals(nba, dm, 0) == [1]  # 2 unreachable


def test_feasible_finals_requires_cycle():
    doc = {"states": [0, 1], "initial": [0], "finals": [1],
           "transitions": [{"from": 0, "to": 1, "guard": "true"}]}
    nba = lp.prune_infeasible(lp.parse_nba(doc), 1)
    dm = lp.distance_matrix(nba)
    assert lp.feasible_finals(nba, dm, 0) == []


def test_feasible_finals_in_recurrence(recurrence_nba):
    nba = lp.prune_infeasible(recurrence_nba, 1)
    dm = lp.distance_matrix(nba)
    assert lp.feasible_finals(nba, dm, 0) == [2]
    for f in lp.feasible_finals(nba, dm, 0):
        # returned finals admit a closed feasible walk: BFS comes back
        frontier = [f]
        seen = set()
        back = False
        while frontier and not back:
            q = frontier.pop()
            for q2 in nba.feasible_successors(q):
                if q2 == f:
                    back = True
                    break
                if q2 not in seen:
                    seen.add(q2)
                    frontier.append(q2)
        assert back


# --- pick_symbol ---------------------------------------------------------------

def test_pick_symbol_single_robot():
    doc = {"states": [0, 1], "initial": [0], "finals": [1],
           "transitions": [{"from": 0, "to": 1,
                            "guard": {"dnf": [{"pos": [[1, "r6"]], "neg": []}]}}]}
    nba = lp.prune_infeasible(lp.parse_nba(doc), 2)
    assert lp.pick_symbol(nba, 0, 1) == {1: "r6"}


def test_pick_symbol_two_robots():
    doc = {"states": [0, 1], "initial": [0], "finals": [1],
           "transitions": [{"from": 0, "to": 1,
                            "guard": {"dnf": [{"pos": [[1, "rj"], [3, "re"]], "neg": []}]}}]}
    nba = lp.prune_infeasible(lp.parse_nba(doc), 3)
    lmap = lp.pick_symbol(nba, 0, 1)
    assert lmap == {1: "rj", 3: "re"}
    assert 2 not in lmap


def test_pick_symbol_deterministic():
    doc = {"states": [0, 1], "initial": [0], "finals": [1],
           "transitions": [{"from": 0, "to": 1,
                            "guard": {"dnf": [{"pos": [[1, 4]], "neg": []},
                                              {"pos": [[1, 2]], "neg": []}]}}]}
    nba = lp.prune_infeasible(lp.parse_nba(doc), 1)
    first = lp.pick_symbol(nba, 0, 1)
    for _ in range(5):
        assert lp.pick_symbol(nba, 0, 1) == first
    assert first == {1: 4}  # declaration order decides


def test_pick_symbol_missing_transition():
    doc = {"states": [0, 1], "initial": [0], "finals": [1],
           "transitions": [{"from": 0, "to": 1, "guard": "true"}]}
    nba = lp.prune_infeasible(lp.parse_nba(doc), 1)
    with pytest.raises(RuntimeError):
        lp.pick_symbol(nba, 1, 0)
