import pytest

from goma import load_bundled_scenario
from goma.config import AssistConfig
from goma.planner import PlannerConfig


@pytest.fixture
def fast_cfg():
    """Small sampling budget so unit tests stay quick."""
    return AssistConfig(
        planner=PlannerConfig(samples=2, budget=400, horizon=30, tau=0.25),
        comm_cost=0.5, particles=2, seed=0)


@pytest.fixture
def tiny_household():
    return load_bundled_scenario("tiny_household")


@pytest.fixture
def tiny_kitchen():
    return load_bundled_scenario("tiny_kitchen")
