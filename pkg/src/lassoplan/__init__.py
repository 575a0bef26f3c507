"""lassoplan: prefix-suffix plan synthesis for robot teams.

Robot mobility is modeled per robot as a weighted transition system
over workspace regions; the joint task is a Buchi-style automaton whose
guards are disjunctions of (robot, region) literals. Plans are found by
growing random trees over the implicit product of team motion and task
automaton, with sampling biased along automaton shortest paths toward
accepting states. An explicit-product oracle provides exact optima for
validation at small scale, and a harness runs seeded experiments.
"""

from .automaton import (
    Conjunct,
    DistanceMatrix,
    Guard,
    Nba,
    distance_matrix,
    feasible_finals,
    guard_sat,
    load_nba_file,
    nba_to_json,
    parse_nba,
    pick_symbol,
    prune_infeasible,
)
from .errors import (
    AutomatonParseError,
    ConfigError,
    ExplicitProductTooLarge,
    LassoplanError,
    ModelError,
    NotATransitionError,
)
from .model import (
    PathCache,
    Wts,
    generate_grid,
    generate_random_wts,
    load_wts_file,
    pts_step_weight,
    reachable_set,
    shortest_path,
    team_initial,
    team_label,
    wts_from_json,
    wts_to_json,
)
from .oracle import (
    ExplicitPba,
    VerifyResult,
    build_explicit_pba,
    optimal_plan_exact,
    verify_plan,
)
from .planner import (
    Plan,
    PlannerContext,
    SamplerConfig,
    SynthesisReport,
    construct_tree,
    plan_from_json,
    plan_to_json,
    synthesize,
    synthesize_first,
)

__version__ = "0.1.0"
