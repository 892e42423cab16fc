"""Batch experiment runner: seeded episodes, metrics, CSV/markdown reports.

An episode pairs the simulated human proxy with one assistant condition and
runs the world to goal or T_max.  Suites sweep (scenario, condition, seed)
and emit per-episode JSONL logs, metrics.csv, report.md, and summary figures.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import agents as A
from . import belief as B
from . import planner as P
from . import utterances as U
from . import world as W
from .config import AssistConfig

log = logging.getLogger(__name__)

T_MAX = 80
SINGLE = "single"
CONDITIONS = (SINGLE, A.GOMA, A.NOCOMM, A.HEURCOMM, A.GOALAG)

METRICS_HEADER = ("scenario,condition,seed,steps,utterances,coldness,"
                  "speedup,total_cost,outcome")


class EpisodeError(RuntimeError):
    pass


@dataclass
class Scenario:
    config: dict

    @property
    def name(self) -> str:
        return self.config.get("name", W.scenario_digest(self.config))

    @property
    def family(self) -> str:
        return self.config["family"]

    @property
    def condition(self) -> int:
        default = 1 if self.family == W.KITCHEN else 2
        return int(self.config.get("condition", default))

    @property
    def human_id(self) -> str:
        return self.config.get("human", sorted(self.config["agents"])[0])

    @property
    def robot_id(self) -> str:
        others = [a for a in sorted(self.config["agents"])
                  if a != self.human_id]
        return self.config.get("robot", others[0] if others else None)

    def goal_space(self) -> list[W.Goal]:
        return [W.parse_goal(g) for g in self.config["goal_space"]]

    def true_goal(self) -> W.Goal:
        name = self.config["true_goal"]
        for g in self.goal_space():
            if g.name == name:
                return g
        raise W.ScenarioError(f"true_goal {name!r} not in goal space")

    def initial_state(self) -> W.WorldState:
        return W.load_scenario(self.config)

    def known(self, agent: str) -> list[str]:
        return list(self.config["agents"][agent].get("known", []))

    @staticmethod
    def from_file(path: str | Path) -> "Scenario":
        with open(path) as fh:
            cfg = json.load(fh)
        Scenario._validate(cfg)
        return Scenario(cfg)

    @staticmethod
    def _validate(cfg: dict) -> None:
        W.load_scenario(cfg)  # raises ScenarioError on malformed configs
        if "goal_space" not in cfg or not cfg["goal_space"]:
            raise W.ScenarioError("scenario has no goal_space")


@dataclass
class StepRecord:
    clock: int
    actions: dict[str, str]
    utterances: dict[str, dict | None]
    texts: dict[str, str]
    mind_digest: str | None = None
    trace: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"clock": self.clock, "actions": self.actions,
                "utterances": self.utterances, "texts": self.texts,
                "mind_digest": self.mind_digest, "trace": self.trace}


@dataclass
class EpisodeLog:
    scenario: str
    condition: str
    seed: int
    records: list[StepRecord]
    terminal_clock: int
    outcome: str  # "goal" or "timeout"
    hot_completions: dict[str, int]
    terminal_digest: str

    def utterance_count(self, agent: str | None = None) -> int:
        total = 0
        for rec in self.records:
            for aid, u in rec.utterances.items():
                if u is not None and (agent is None or aid == agent):
                    total += 1
        return total

    def to_json_lines(self) -> list[str]:
        header = {"scenario": self.scenario, "condition": self.condition,
                  "seed": self.seed, "terminal_clock": self.terminal_clock,
                  "outcome": self.outcome,
                  "hot_completions": self.hot_completions,
                  "terminal_digest": self.terminal_digest}
        lines = [json.dumps(header, sort_keys=True)]
        lines += [json.dumps(r.to_json(), sort_keys=True)
                  for r in self.records]
        return lines

    @staticmethod
    def from_json_lines(lines: list[str]) -> "EpisodeLog":
        header = json.loads(lines[0])
        records = []
        for line in lines[1:]:
            d = json.loads(line)
            records.append(StepRecord(d["clock"], d["actions"],
                                      d["utterances"], d["texts"],
                                      d.get("mind_digest"),
                                      d.get("trace", {})))
        return EpisodeLog(header["scenario"], header["condition"],
                          header["seed"], records, header["terminal_clock"],
                          header["outcome"], header["hot_completions"],
                          header["terminal_digest"])


def speedup(l_single: int, l_team: int) -> float:
    """Plan-length speedup of the team over the solo run."""
    if l_team <= 0:
        raise ValueError("team plan length must be positive")
    if l_single <= 0:
        raise ValueError("single plan length must be positive")
    return l_single / l_team - 1.0


def total_cost(steps: int, utterances: int,
               hot_completions: list[int]) -> int:
    """steps + utterances + sum of (steps - completion step) per hot item."""
    for li in hot_completions:
        if li > steps:
            raise ValueError("hot item completed after episode end")
    return steps + utterances + sum(steps - li for li in hot_completions)


def _build_assistant(scenario: Scenario, state: W.WorldState, condition: str,
                     cfg: AssistConfig):
    robot = scenario.robot_id
    human = scenario.human_id
    known = scenario.known(robot)
    fixed = scenario.true_goal() if scenario.condition == 1 else None
    if condition == A.GOMA:
        return A.GomaAssistant(state, robot, human, scenario.goal_space(),
                               cfg, fixed_goal=fixed, known=known)
    return A.BaselineAssistant(state, robot, human, scenario.goal_space(),
                               condition, cfg, fixed_goal=fixed, known=known)


def run_episode(scenario: Scenario, condition: str, seed: int,
                cfg: AssistConfig, t_max: int = T_MAX) -> EpisodeLog:
    """Run one seeded episode to goal or t_max. Deterministic."""
    if condition not in CONDITIONS:
        raise ValueError(f"unknown condition {condition!r}")
    P.clear_plan_cache()
    cfg = replace(cfg, seed=seed, condition=scenario.condition)

    state = scenario.initial_state()
    human = scenario.human_id
    robot = scenario.robot_id
    goal = scenario.true_goal()

    if condition == SINGLE:
        if robot is not None:
            del state.agents[robot]
        assistant = None
    else:
        assistant = _build_assistant(scenario, state, condition, cfg)

    chat = condition not in (SINGLE, A.NOCOMM)
    proxy = A.HumanProxy(state, human, goal, cfg.planner, seed,
                         condition=scenario.condition,
                         known=scenario.known(human), chat=chat)

    records: list[StepRecord] = []
    obs = {aid: W.observe(state, aid) for aid in state.agents}
    to_human: U.Utterance | None = None
    to_robot: U.Utterance | None = None
    a_h_visible: W.Action | None = None
    outcome = "timeout"

    while state.clock < t_max:
        if W.goal_satisfied(state, goal):
            outcome = "goal"
            break
        frame = proxy.belief.frame
        legal_h = W.legal_actions(state, human)
        a_h, u_h = proxy.step(obs[human], to_human, legal_h)
        actions = {human: a_h}
        utts: dict[str, U.Utterance | None] = {human: u_h if chat else None}
        trace = {}
        mind_digest = None
        if assistant is not None:
            legal_r = W.legal_actions(state, robot)
            a_r, u_r = assistant.step(obs[robot], to_robot, legal_r,
                                      a_h=a_h_visible)
            if not chat:
                u_r = None
            actions[robot] = a_r
            utts[robot] = u_r
            trace = dict(getattr(assistant, "last_trace", {}) or {})
            if condition == A.GOMA:
                mind_digest = assistant.mind.belief.digest()
        same_room = (assistant is not None
                     and state.agents[human].room == state.agents[robot].room)
        state, obs = W.step(state, actions)
        a_h_visible = a_h if same_room else None
        to_human = utts.get(robot)
        to_robot = utts[human]
        records.append(StepRecord(
            clock=state.clock,
            actions={a: act.encode() for a, act in actions.items()},
            utterances={a: (u.to_json() if u else None)
                        for a, u in utts.items()},
            texts={a: (U.render_utterance(u, frame) if u else "")
                   for a, u in utts.items()},
            mind_digest=mind_digest,
            trace=trace,
        ))
    else:
        if W.goal_satisfied(state, goal):
            outcome = "goal"

    return EpisodeLog(
        scenario=scenario.name, condition=condition, seed=seed,
        records=records, terminal_clock=state.clock, outcome=outcome,
        hot_completions=dict(state.cook_clock),
        terminal_digest=state.digest())


def replay(scenario: Scenario, episode: EpisodeLog) -> W.WorldState:
    """Re-simulate a logged action sequence; returns the terminal state."""
    state = scenario.initial_state()
    if episode.condition == SINGLE and scenario.robot_id in state.agents:
        del state.agents[scenario.robot_id]
    for rec in episode.records:
        actions = {aid: W.Action.decode(a) for aid, a in rec.actions.items()}
        state, _ = W.step(state, actions)
    return state


@dataclass
class MetricsRow:
    scenario: str
    condition: str
    seed: int
    steps: int
    utterances: int
    coldness: int
    speedup: float
    total_cost: int
    outcome: str

    def csv(self) -> str:
        return (f"{self.scenario},{self.condition},{self.seed},{self.steps},"
                f"{self.utterances},{self.coldness},{self.speedup:.6f},"
                f"{self.total_cost},{self.outcome}")


def episode_metrics(scenario: Scenario, episode: EpisodeLog,
                    l_single: int) -> MetricsRow:
    steps = episode.terminal_clock if episode.outcome == "goal" else T_MAX
    utts = episode.utterance_count()
    hot = ([li for li in episode.hot_completions.values()]
           if scenario.family == W.KITCHEN else [])
    coldness = sum(steps - li for li in hot)
    cost = total_cost(steps, utts, hot)
    spd = speedup(l_single, steps)
    return MetricsRow(scenario.name, episode.condition, episode.seed, steps,
                      utts, coldness, spd, cost, episode.outcome)


def sign_test(pairs: list[tuple[float, float]]) -> float:
    """One-sided paired sign test p-value for first < second."""
    from scipy.stats import binomtest
    wins = sum(1 for a, b in pairs if a < b)
    n = sum(1 for a, b in pairs if a != b)
    if n == 0:
        return 1.0
    return float(binomtest(wins, n, alternative="greater").pvalue)


def suite_conditions(family: str) -> list[str]:
    if family == W.KITCHEN:
        return [SINGLE, A.GOMA, A.NOCOMM, A.HEURCOMM]
    return [SINGLE, A.GOMA, A.NOCOMM, A.GOALAG]


def run_suite(scenarios: list[Scenario], seeds: list[int], cfg: AssistConfig,
              conditions: dict[str, list[str]] | None = None,
              out_dir: str | Path | None = None,
              t_max: int = T_MAX) -> dict:
    """Run every (scenario, condition, seed) episode and aggregate metrics."""
    rows: list[MetricsRow] = []
    logs: list[EpisodeLog] = []
    for scenario in sorted(scenarios, key=lambda s: s.name):
        conds = (conditions or {}).get(scenario.name) \
            or suite_conditions(scenario.family)
        for seed in seeds:
            singles: dict[int, int] = {}
            try:
                solo = run_episode(scenario, SINGLE, seed, cfg, t_max)
            except Exception:
                log.exception("single-agent episode crashed: %s/%s",
                              scenario.name, seed)
                continue
            l_single = solo.terminal_clock if solo.outcome == "goal" else t_max
            for cond in conds:
                if cond == SINGLE:
                    episode = solo
                else:
                    try:
                        episode = run_episode(scenario, cond, seed, cfg, t_max)
                    except Exception:
                        log.exception("episode crashed: %s/%s/%s",
                                      scenario.name, cond, seed)
                        rows.append(MetricsRow(scenario.name, cond, seed,
                                               t_max, 0, 0, 0.0,
                                               t_max * 3, "crashed"))
                        continue
                rows.append(episode_metrics(scenario, episode, l_single))
                logs.append(episode)

    rows.sort(key=lambda r: (r.scenario, r.condition, r.seed))
    summary = summarize(rows, [s for s in scenarios])
    if out_dir is not None:
        write_outputs(Path(out_dir), rows, logs, summary)
    return {"rows": rows, "logs": logs, "summary": summary}


def summarize(rows: list[MetricsRow], scenarios: list[Scenario]) -> dict:
    family_of = {s.name: s.family for s in scenarios}
    by_key: dict[tuple, MetricsRow] = {
        (r.scenario, r.condition, r.seed): r for r in rows}
    conditions = sorted({r.condition for r in rows})
    families = sorted({family_of.get(r.scenario, "?") for r in rows})

    means: dict[str, dict[str, dict[str, float]]] = {}
    pvalues: dict[str, dict[str, float]] = {}
    for fam in families:
        fam_rows = [r for r in rows if family_of.get(r.scenario) == fam]
        means[fam] = {}
        for cond in conditions:
            sub = [r for r in fam_rows if r.condition == cond]
            if not sub:
                continue
            means[fam][cond] = {
                "steps": sum(r.steps for r in sub) / len(sub),
                "utterances": sum(r.utterances for r in sub) / len(sub),
                "coldness": sum(r.coldness for r in sub) / len(sub),
                "speedup": sum(r.speedup for r in sub) / len(sub),
                "total_cost": sum(r.total_cost for r in sub) / len(sub),
                "n": len(sub),
            }
        pvalues[fam] = {}
        for cond in conditions:
            if cond in (A.GOMA, SINGLE) or cond not in means[fam]:
                continue
            pairs = []
            for r in fam_rows:
                if r.condition != A.GOMA:
                    continue
                other = by_key.get((r.scenario, cond, r.seed))
                if other is not None:
                    pairs.append((r.total_cost, other.total_cost))
            if pairs:
                pvalues[fam][cond] = sign_test(pairs)
    return {"means": means, "pvalues": pvalues}


def write_outputs(out_dir: Path, rows: list[MetricsRow],
                  logs: list[EpisodeLog], summary: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "metrics.csv", "w") as fh:
        fh.write(METRICS_HEADER + "\n")
        for row in rows:
            fh.write(row.csv() + "\n")
    logs_dir = out_dir / "episodes"
    logs_dir.mkdir(exist_ok=True)
    for ep in logs:
        path = logs_dir / f"{ep.scenario}__{ep.condition}__{ep.seed}.jsonl"
        path.write_text("\n".join(ep.to_json_lines()) + "\n")
    (out_dir / "report.md").write_text(render_report(summary))
    try:
        from .plots import render_figures
        render_figures(out_dir, summary)
    except Exception:
        log.exception("figure rendering failed; tables were still written")


def render_report(summary: dict) -> str:
    lines = ["# Suite report", ""]
    for fam in sorted(summary["means"]):
        lines.append(f"## {fam}")
        lines.append("")
        lines.append("| condition | n | steps | utterances | coldness |"
                     " speedup | total cost |")
        lines.append("|---|---|---|---|---|---|---|")
        for cond in sorted(summary["means"][fam]):
            m = summary["means"][fam][cond]
            lines.append(
                f"| {cond} | {m['n']:.0f} | {m['steps']:.2f} |"
                f" {m['utterances']:.2f} | {m['coldness']:.2f} |"
                f" {m['speedup']:.3f} | {m['total_cost']:.2f} |")
        lines.append("")
        if summary["pvalues"].get(fam):
            lines.append("Paired sign test, goma total cost vs baseline:")
            lines.append("")
            for cond in sorted(summary["pvalues"][fam]):
                p = summary["pvalues"][fam][cond]
                lines.append(f"- vs {cond}: p = {p:.4g}")
            lines.append("")
    return "\n".join(lines) + "\n"
