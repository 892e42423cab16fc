"""Run-time configuration for the assistant's reasoning loop."""
from __future__ import annotations

from dataclasses import dataclass, field

from .planner import PlannerConfig


@dataclass(frozen=True)
class AssistConfig:
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    comm_cost: float = 1.0      # C, in plan-cost units
    h_max: float = 0.5          # knowledge entropy threshold, nats
    particles: int = 10         # L
    eps_goal: float = 0.01      # weight for goal-inconsistent utterances
    seed: int = 0
    condition: int = 2          # 1: shared known goal, 2: inferred goal


def suite_config(seed: int = 0) -> AssistConfig:
    """Configuration tuned for the bundled experiment suite.

    Smaller sample counts and a sharper softmax than the library defaults:
    the bundled scenarios are small enough that 3 determinizations suffice,
    and the full suite has to finish in minutes rather than hours.
    """
    return AssistConfig(
        planner=PlannerConfig(samples=3, budget=600, horizon=40, tau=0.25),
        comm_cost=0.5,
        particles=3,
        seed=seed,
    )
