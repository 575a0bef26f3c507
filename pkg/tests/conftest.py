"""Shared fixtures and instance builders for the test suite."""

from __future__ import annotations

import random

import pytest

from lassoplan import Wts, parse_nba


def chain_wts(n: int = 4, with_self_loops: bool = True, robot_id: int = 1,
              weight: float = 1.0, self_loop_weight: float = 0.0) -> Wts:
    """Bidirectional chain 0-1-...-(n-1), optional zero-cost waits."""
    edges = []
    for k in range(n - 1):
        edges.append((k, k + 1, weight))
        edges.append((k + 1, k, weight))
    if with_self_loops:
        for k in range(n):
            edges.append((k, k, self_loop_weight))
    return Wts(robot_id=robot_id, states=tuple(range(n)), initial=0, edges=tuple(edges))


def fig_recurrence_nba(robot: int = 1, r_a=2, r_b=0) -> dict:
    """Three-state automaton for visiting two regions infinitely often.

    The direct initial-to-final edge and the final self-loop demand one
    robot in both regions at once, so pruning must remove them while the
    two-hop route survives and the final state keeps a cycle via the
    middle state.
    """
    both = {"dnf": [{"pos": [[robot, r_a], [robot, r_b]], "neg": []}]}
    at_a = {"dnf": [{"pos": [[robot, r_a]], "neg": []}]}
    at_b = {"dnf": [{"pos": [[robot, r_b]], "neg": []}]}
    return {
        "states": [0, 1, 2],
        "initial": [0],
        "finals": [2],
        "transitions": [
            {"from": 0, "to": 0, "guard": "true"},
            {"from": 0, "to": 1, "guard": at_a},
            {"from": 0, "to": 2, "guard": both},
            {"from": 1, "to": 1, "guard": "true"},
            {"from": 1, "to": 2, "guard": at_b},
            {"from": 2, "to": 2, "guard": both},
            {"from": 2, "to": 1, "guard": "true"},
        ],
    }


def make_cycle_nba(stages: list, finals: list, regions_by_robot: dict,
                   infeasible_final_loops: bool = True) -> dict:
    """Surveillance-style automaton: a cycle of stage conditions.

    stages[i] is the conjunct (list of [robot, region] atoms) guarding
    the advance into state i. Non-accepting states wait on a negated
    atom of the next stage; accepting states advance unconditionally and
    carry an infeasible self-loop (dropped by pruning), so loops around
    them must walk the whole stage cycle.
    """
    k = len(stages)
    finals_set = set(finals)
    transitions = []
    for i in range(k):
        nxt = (i + 1) % k
        if i in finals_set:
            transitions.append({"from": i, "to": nxt, "guard": "true"})
            if infeasible_final_loops:
                rb, rg = stages[i][0]
                other = next(r for r in regions_by_robot[rb] if r != rg)
                transitions.append({
                    "from": i, "to": i,
                    "guard": {"dnf": [{"pos": [[rb, rg], [rb, other]], "neg": []}]},
                })
        else:
            transitions.append({
                "from": i, "to": nxt,
                "guard": {"dnf": [{"pos": [list(a) for a in stages[nxt]], "neg": []}]},
            })
            transitions.append({
                "from": i, "to": i,
                "guard": {"dnf": [{"pos": [], "neg": [list(stages[nxt][0])]}]},
            })
    return {
        "states": list(range(k)),
        "initial": [0],
        "finals": sorted(finals_set),
        "transitions": transitions,
    }


def random_task_nba(rng: random.Random, n_states: int, robot_regions: dict) -> dict:
    """Random solvable task automaton.

    A progress chain from the initial state to the last state, closed
    into a cycle, with random extra edges, self-loops of varying guard
    styles, and an occasional infeasible conjunct for the pruner to
    drop. robot_regions maps robot id to its region list.
    """
    robots = sorted(robot_regions)

    def atom():
        rb = robots[rng.randrange(len(robots))]
        regions = robot_regions[rb]
        return [rb, regions[rng.randrange(len(regions))]]

    def pos_conjunct(max_atoms: int = 2):
        n = 1 + rng.randrange(max_atoms)
        used = {}
        for _ in range(n):
            a = atom()
            used[a[0]] = a  # one region per robot keeps it feasible
        return {"pos": sorted(used.values()), "neg": []}

    states = list(range(n_states))
    finals = [n_states - 1] if n_states == 2 or rng.random() < 0.6 else [
        n_states - 1, rng.randrange(1, n_states - 1)
    ]
    transitions = []
    seen = set()

    def add(src, dst, guard):
        if (src, dst) in seen:
            return
        seen.add((src, dst))
        transitions.append({"from": src, "to": dst, "guard": guard})

    for i in range(n_states - 1):
        add(i, i + 1, {"dnf": [pos_conjunct()]})
    add(n_states - 1, 0, "true" if rng.random() < 0.5 else {"dnf": [pos_conjunct(1)]})
    for i in range(n_states):
        if i == 0:
            # the initial state always keeps a live waiting loop, else most
            # instances die before the team can move at all
            guard = "true" if rng.random() < 0.6 else {"dnf": [{"pos": [], "neg": [atom()]}]}
            add(0, 0, guard)
            continue
        style = rng.random()
        if style < 0.4:
            add(i, i, "true")
        elif style < 0.7:
            add(i, i, {"dnf": [{"pos": [], "neg": [atom()]}]})
        elif style < 0.85 and len(robot_regions[robots[0]]) >= 2:
            regions = robot_regions[robots[0]]
            two = rng.sample(regions, 2)
            add(i, i, {"dnf": [{"pos": [[robots[0], two[0]], [robots[0], two[1]]], "neg": []}]})
    extra = rng.randrange(n_states)
    for _ in range(extra):
        src = rng.randrange(n_states)
        dst = rng.randrange(n_states)
        add(src, dst, {"dnf": [pos_conjunct()]})
    return {
        "states": states,
        "initial": [0],
        "finals": sorted(set(finals)),
        "transitions": transitions,
    }


def random_desk_instance(seed: int):
    """Small random team-plus-task instance for oracle-versus-sampler checks."""
    from lassoplan import generate_random_wts

    rng = random.Random(seed)
    n_robots = 1 if rng.random() < 0.6 else 2
    team = []
    for i in range(n_robots):
        n_states = rng.randrange(4, 9 if n_robots == 2 else 17)
        team.append(generate_random_wts(
            n_states=n_states,
            avg_degree=min(n_states, 3.0),
            seed=rng.randrange(1 << 30),
            weight_range=(1.0, 10.0),
            robot_id=i + 1,
        ))
    robot_regions = {w.robot_id: list(w.states) for w in team}
    n_b = rng.randrange(3, 7)
    nba = parse_nba(random_task_nba(rng, n_b, robot_regions))
    return team, nba


@pytest.fixture
def chain4():
    return chain_wts(4)


@pytest.fixture
def recurrence_nba():
    return parse_nba(fig_recurrence_nba())
