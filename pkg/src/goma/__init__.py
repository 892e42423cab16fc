"""Goal-oriented mental alignment: simulator, beliefs, planner, and the
communication-planning assistant."""
from importlib import resources

from .harness import Scenario

__version__ = "0.1.0"


def bundled_scenario_names() -> list[str]:
    root = resources.files("goma.scenarios")
    return sorted(p.name.removesuffix(".json")
                  for p in root.iterdir() if p.name.endswith(".json"))


def load_bundled_scenario(name: str) -> Scenario:
    import json
    root = resources.files("goma.scenarios")
    data = json.loads((root / f"{name}.json").read_text())
    Scenario._validate(data)
    return Scenario(data)
