"""Planner configuration."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ConfigError

BIAS_CHOICES = ("sequential", "uniform")  # plus "fixed:<state>"
SCHEDULE_CHOICES = ("on_goal_found", "always_biased")  # plus "uniform_after:<n>"
REWIRE_CHOICES = ("always", "on_goal", "never")


@dataclass
class SamplerConfig:
    """Knobs for the biased sampling process.

    p_rand is the probability mass placed on the frontier nodes nearest
    the bias target; p_new the mass placed on the shortest-path hop of a
    steered robot. Both must stay strictly inside (0, 1); their distance
    to {0, 1} is the floor epsilon that keeps every candidate sampleable.

    bias selects the target policy: "sequential" rotates over feasible
    final states, "fixed:<state>" pins one, "uniform" disables steering
    entirely. schedule decides when steering gives way to uniform
    exploration: "on_goal_found" (default) after the goals the bias
    chases have been detected, "uniform_after:<n>" additionally after n
    iterations, "always_biased" never.
    """

    p_rand: float = 0.9
    p_new: float = 0.9
    bias: str = "sequential"
    schedule: str = "on_goal_found"
    rng_seed: int = 0
    rewire: str = "always"
    skip_unreachable_buchi: bool = False
    # Steering can gate every sample once the whole frontier sits next to
    # the target (nothing decreases the hop distance any further), which
    # would starve the tree. After this many insertion-free rounds the
    # tree falls back to uniform densities; always_biased disables it.
    stall_uniform_after: int = 200

    def __post_init__(self):
        if not 0.0 < self.p_rand < 1.0:
            raise ConfigError(f"p_rand must be in (0,1), got {self.p_rand}")
        if not 0.0 < self.p_new < 1.0:
            raise ConfigError(f"p_new must be in (0,1), got {self.p_new}")
        if self.stall_uniform_after is not None and self.stall_uniform_after < 1:
            raise ConfigError("stall_uniform_after must be >= 1 or None")
        if self.bias not in BIAS_CHOICES and not self.bias.startswith("fixed:"):
            raise ConfigError(f"unknown bias policy {self.bias!r}")
        if self.schedule not in SCHEDULE_CHOICES and not self._uniform_after_valid():
            raise ConfigError(f"unknown schedule {self.schedule!r}")
        if self.rewire not in REWIRE_CHOICES:
            raise ConfigError(f"unknown rewire policy {self.rewire!r}")

    def _uniform_after_valid(self) -> bool:
        if not self.schedule.startswith("uniform_after:"):
            return False
        try:
            return int(self.schedule.split(":", 1)[1]) >= 0
        except ValueError:
            return False

    @property
    def uniform_after(self) -> int | None:
        if self.schedule.startswith("uniform_after:"):
            return int(self.schedule.split(":", 1)[1])
        return None

    @property
    def epsilon(self) -> float:
        """Strictly positive floor below the biased probability masses."""
        return min(self.p_rand, 1.0 - self.p_rand, self.p_new, 1.0 - self.p_new)

    @property
    def fixed_target(self):
        if self.bias.startswith("fixed:"):
            raw = self.bias.split(":", 1)[1]
            return int(raw) if raw.lstrip("-").isdigit() else raw
        return None
