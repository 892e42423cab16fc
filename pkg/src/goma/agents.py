"""Simulated human proxy and the baseline assistants.

All agents act through the same planner; they differ only in what they say
and when.  Each is stateful across an episode but deterministic given its
seed and the message/observation stream.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import belief as B
from . import comms as C
from . import mind as M
from . import planner as P
from . import utterances as U
from . import world as W
from .config import AssistConfig
from .rngutil import stable_rng

GOMA = "goma"
NOCOMM = "nocomm"
HEURCOMM = "heur"
GOALAG = "goalag"
VARIANTS = (GOMA, NOCOMM, HEURCOMM, GOALAG)

HEUR_PERIOD = 8  # steps between HeurComm progress requests


class HumanProxy:
    """Greedy planning human: answers requests truthfully, absorbs shares,
    and (condition 2) opens with a help request over sampled goal predicates."""

    def __init__(self, state: W.WorldState, agent_id: str, goal: W.Goal,
                 cfg: P.PlannerConfig, seed: int, condition: int = 2,
                 known: list[str] | None = None, chat: bool = True):
        frame = B.Frame.of(state)
        self.agent_id = agent_id
        self.goal = goal
        self.cfg = cfg
        self.condition = condition
        self.chat = chat
        self.h_max = B.DEFAULT_H_MAX
        self.belief = B.init_uniform(state, agent_id, frame)
        if known:
            self.belief = B.seed_knowledge(self.belief, state, known)
        self.universe = W.action_universe(state, agent_id)
        self.template = state.copy()
        self.rng = stable_rng("human", seed)
        self.t = 0

    def _help_request(self) -> U.Utterance:
        preds = self.goal.predicates if self.goal.family == W.HOUSEHOLD \
            else self.goal.ingredients
        k = self.rng.randint(1, len(preds))
        picks = sorted(self.rng.sample(range(len(preds)), k))
        cats = [preds[i].category for i in picks]
        counts = [getattr(preds[i], "count", 0) for i in picks]
        return U.make_goal_hint(cats, counts)

    def _answer(self, request: U.Utterance) -> U.Utterance:
        known = B.knowledge(self.belief, self.h_max)
        if request.substate in known:
            return U.make_share(request.substate, known[request.substate])
        return U.UNKNOWN_REPLY

    def step(self, obs: W.Observation, incoming: U.Utterance | None,
             legal: set[W.Action]) -> tuple[W.Action, U.Utterance | None]:
        self.belief = B.update_from_observation(self.belief, obs)
        utterance = None
        if incoming is not None and self.chat:
            if incoming.kind == U.SHARE:
                try:
                    self.belief = B.update_from_message(
                        self.belief, (incoming.substate,
                                      incoming.content_dist()))
                except (KeyError, ValueError):
                    pass
            elif incoming.kind == U.REQUEST:
                utterance = self._answer(incoming)
        if self.t == 0 and self.condition == 2 and self.chat \
                and utterance is None:
            utterance = self._help_request()
        policy = P.plan(self.belief, self.goal, self.agent_id, self.template,
                        self.cfg, self.universe)
        action = policy.argmax(allowed=legal)
        self.t += 1
        return action, utterance


class GomaAssistant:
    """Wraps the mind + decision core behind the common assistant interface."""

    variant = GOMA

    def __init__(self, state: W.WorldState, robot_id: str, human_id: str,
                 goal_space: list[W.Goal], cfg: AssistConfig,
                 fixed_goal: W.Goal | None = None,
                 known: list[str] | None = None):
        self.cfg = cfg
        self.template = state.copy()
        self.mind = M.init_mind(state, robot_id, human_id, goal_space, cfg,
                                fixed_goal=fixed_goal, known=known)
        self.last_trace: dict = {}

    def step(self, obs: W.Observation, incoming: U.Utterance | None,
             legal: set[W.Action], a_h: W.Action | None = None,
             ) -> tuple[W.Action, U.Utterance | None]:
        action, utterance, self.mind, self.last_trace = C.step(
            self.mind, obs, self.template, self.cfg, u_h=incoming, a_h=a_h,
            legal=legal)
        return action, utterance


class BaselineAssistant:
    """NoComm / HeurComm / GoalAgnostic assistants.

    Each carries the same inference mind and action policy as the full
    assistant; only the utterance policy is replaced (silence, heuristic
    rules, or goal-agnostic random shares).
    """

    def __init__(self, state: W.WorldState, robot_id: str, human_id: str,
                 goal_space: list[W.Goal], variant: str, cfg: AssistConfig,
                 fixed_goal: W.Goal | None = None,
                 known: list[str] | None = None):
        if variant not in (NOCOMM, HEURCOMM, GOALAG):
            raise ValueError(f"unknown assistant variant {variant!r}")
        self.variant = variant
        self.cfg = cfg
        self.template = state.copy()
        self.universe = W.action_universe(state, robot_id)
        self.mind = M.init_mind(state, robot_id, human_id, goal_space, cfg,
                                fixed_goal=fixed_goal, known=known)
        self.rng = stable_rng("baseline", variant, cfg.seed)
        self._satisfied: set = set()
        self._human_knows: set[str] = set()
        self._pending_request = False
        self.last_trace: dict = {}

    def _map_goal(self) -> W.Goal:
        m = self.mind
        if m.fixed_goal is not None:
            return m.fixed_goal
        best = max(sorted(m.goal_posterior), key=lambda k: m.goal_posterior[k])
        return next(g for g in m.goal_space if g.key() == best)

    def _subgoal_states(self) -> dict:
        """Sub-goal completion snapshot from the assistant's belief."""
        out = {}
        goal = self._map_goal()
        belief = self.mind.belief
        known = B.knowledge(belief, self.cfg.h_max)
        if goal.family == W.KITCHEN:
            for i, ing in enumerate(goal.ingredients):
                for oid, dist in known.items():
                    if belief.frame.categories.get(oid) != ing.category:
                        continue
                    loc, status = max(dist, key=dist.get)
                    if status == ing.status:
                        out[i] = oid
        else:
            for i, pred in enumerate(goal.predicates):
                placed = []
                for oid, dist in known.items():
                    if belief.frame.categories.get(oid) != pred.category:
                        continue
                    top = max(dist, key=dist.get)
                    if top[0] in pred.targets:
                        placed.append(oid)
                if len(placed) >= pred.count:
                    out[i] = sorted(placed)[0]
        return out

    def _goal_relevant_sids(self) -> list[str]:
        goal = self._map_goal()
        cats = ({p.category for p in goal.predicates}
                | {i.category for i in goal.ingredients})
        frame = self.mind.belief.frame
        return sorted(o for o in frame.object_ids
                      if frame.categories[o] in cats)

    def _heur_utterance(self) -> U.Utterance | None:
        completed = self._subgoal_states()
        new = {i for i in completed if i not in self._satisfied}
        if new:
            i = min(new)
            self._satisfied.add(i)
            oid = completed[i]
            known = B.knowledge(self.mind.belief, self.cfg.h_max)
            if self._pending_request:
                pass  # keep the pending request queued behind the share
            return U.make_share(oid, known[oid])
        t = self.mind.step_count
        if t > 0 and t % HEUR_PERIOD == 0:
            self._pending_request = True
        if self._pending_request:
            self._pending_request = False
            candidates = self._goal_relevant_sids()
            best = max(candidates,
                       key=lambda s: (B.entropy(self.mind.belief.dist[s]), s),
                       default=None)
            if best is not None:
                return U.make_request(best)
        return None

    def _goalag_utterance(self) -> U.Utterance | None:
        if self.rng.random() >= 0.5:
            return None
        known = B.knowledge(self.mind.belief, self.cfg.h_max)
        fresh = sorted(s for s in known if s not in self._human_knows)
        if not fresh:
            return None
        sid = self.rng.choice(fresh)
        self._human_knows.add(sid)
        return U.make_share(sid, known[sid])

    def step(self, obs: W.Observation, incoming: U.Utterance | None,
             legal: set[W.Action], a_h: W.Action | None = None,
             ) -> tuple[W.Action, U.Utterance | None]:
        m = self.mind
        human_universe = W.action_universe(self.template, m.human_id)
        m = M.assimilate(m, obs, incoming, m.last_sent, self.template,
                         self.cfg)
        m = M.update_goal_posterior(m, a_h, incoming, self.template, self.cfg,
                                    universe=human_universe)
        self.mind = m

        utterance = None
        if self.variant == HEURCOMM:
            utterance = self._heur_utterance()
        elif self.variant == GOALAG:
            utterance = self._goalag_utterance()

        goals = [M.sample_goal(m, (self.cfg.seed, m.step_count, l))
                 for l in range(len(m.particles))]
        policies = [P.plan(m.belief, g, m.robot_id, self.template,
                           self.cfg.planner, self.universe) for g in goals]
        action = C.select_action(policies, legal=legal)

        m.last_sent = utterance
        m.step_count += 1
        self.last_trace = {
            "chosen": utterance.to_json() if utterance else None,
            "goal_posterior": dict(m.goal_posterior),
            "exploratory": any(p.exploratory for p in policies),
        }
        return action, utterance
