from .config import ExperimentConfig, InstanceSpec, load_experiment_config
from .experiments import (
    product_exponent,
    run_benchmark,
    run_compare_bias,
    run_success_curve,
    write_csv,
)

__all__ = [
    "ExperimentConfig",
    "InstanceSpec",
    "load_experiment_config",
    "product_exponent",
    "run_benchmark",
    "run_compare_bias",
    "run_success_curve",
    "write_csv",
]
