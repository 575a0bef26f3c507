from .config import SamplerConfig
from .construct import ConstructResult, construct_tree
from .context import PlannerContext
from .sampler import (
    SampleState,
    draw_node,
    frand_probabilities,
    robot_step_probabilities,
    sample,
    sample_probe,
)
from .synthesize import (
    Plan,
    SynthesisReport,
    plan_from_json,
    plan_to_json,
    synthesize,
    synthesize_first,
)
from .tree import Tree

__all__ = [
    "ConstructResult",
    "Plan",
    "PlannerContext",
    "SampleState",
    "SamplerConfig",
    "SynthesisReport",
    "Tree",
    "construct_tree",
    "draw_node",
    "frand_probabilities",
    "plan_from_json",
    "plan_to_json",
    "robot_step_probabilities",
    "sample",
    "sample_probe",
    "synthesize",
    "synthesize_first",
]
