"""The assistant's level-1 mind: own belief, human-belief particles, and a
goal posterior maintained by Bayesian inverse planning."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from . import belief as B
from . import planner as P
from . import utterances as U
from . import world as W
from .config import AssistConfig
from .rngutil import stable_rng

log = logging.getLogger(__name__)

INFERRED = "inferred"


@dataclass
class Mind:
    robot_id: str
    human_id: str
    belief: B.Belief0                 # the robot's own level-0 belief
    particles: list[B.Belief0]        # hypothesized human level-0 beliefs
    goal_space: list[W.Goal]
    goal_posterior: dict[str, float]  # goal key -> probability
    condition: int                    # 1: fixed common goal, 2: inferred
    fixed_goal: W.Goal | None
    human_room: str                   # last observed / assumed human room
    last_sent: U.Utterance | None = None
    step_count: int = 0

    def goal_by_key(self, key: str) -> W.Goal:
        for g in self.goal_space:
            if g.key() == key:
                return g
        raise KeyError(key)

    def snapshot(self) -> dict:
        return {
            "belief": self.belief.to_json(),
            "particles": [p.digest() for p in self.particles],
            "goal_posterior": dict(self.goal_posterior),
            "human_room": self.human_room,
            "step": self.step_count,
        }


def init_mind(state: W.WorldState, robot_id: str, human_id: str,
              goal_space: list[W.Goal], cfg: AssistConfig,
              fixed_goal: W.Goal | None = None,
              known: list[str] | None = None) -> Mind:
    frame = B.Frame.of(state)
    b = B.init_uniform(state, robot_id, frame)
    if known:
        b = B.seed_knowledge(b, state, known)
    particles = [B.init_uniform(state, human_id, frame)
                 for _ in range(cfg.particles)]
    n = len(goal_space)
    posterior = {g.key(): 1.0 / n for g in goal_space}
    if cfg.condition == 1:
        if fixed_goal is None:
            raise ValueError("condition 1 requires a fixed common goal")
        posterior = {g.key(): (1.0 if g.key() == fixed_goal.key() else 0.0)
                     for g in goal_space}
        if fixed_goal.key() not in posterior:
            posterior[fixed_goal.key()] = 1.0
    return Mind(robot_id=robot_id, human_id=human_id, belief=b,
                particles=particles, goal_space=goal_space,
                goal_posterior=posterior, condition=cfg.condition,
                fixed_goal=fixed_goal,
                human_room=state.agents[human_id].room)


def _hint_consistent(goal: W.Goal, hint: U.Utterance) -> bool:
    if goal.family == W.HOUSEHOLD:
        cats = {p.category for p in goal.predicates}
    else:
        cats = {i.category for i in goal.ingredients}
    return all(c in cats for c in hint.categories)


def update_goal_posterior(m: Mind, a_h: W.Action | None,
                          u_h: U.Utterance | None,
                          template: W.WorldState, cfg: AssistConfig,
                          universe: tuple[W.Action, ...] | None = None) -> Mind:
    """posterior(g) ∝ P(a_h | g) · P(u_h | g) · prior(g); missing evidence
    terms count as 1."""
    if m.condition == 1 or (a_h is None and u_h is None):
        return m
    distinct: dict[str, tuple[B.Belief0, int]] = {}
    for p in m.particles:
        d = p.digest()
        if d in distinct:
            distinct[d] = (distinct[d][0], distinct[d][1] + 1)
        else:
            distinct[d] = (p, 1)

    posterior = {}
    for goal in m.goal_space:
        key = goal.key()
        weight = m.goal_posterior.get(key, 0.0)
        if a_h is not None:
            total, count = 0.0, 0
            for particle, mult in distinct.values():
                lik = P.action_likelihood(
                    a_h, particle, goal, m.human_id, template, cfg.planner,
                    universe, other_rooms={m.human_id: m.human_room})
                total += lik * mult
                count += mult
            weight *= total / count
        if u_h is not None and u_h.kind == U.GOAL_HINT:
            weight *= 1.0 if _hint_consistent(goal, u_h) else cfg.eps_goal
        posterior[key] = weight

    total = sum(posterior.values())
    if total <= 0.0:
        log.warning("goal posterior underflow; resetting to uniform")
        n = len(m.goal_space)
        posterior = {g.key(): 1.0 / n for g in m.goal_space}
    else:
        posterior = {k: v / total for k, v in posterior.items()}
    m.goal_posterior = posterior
    return m


def sample_goal(m: Mind, seed) -> W.Goal:
    if m.condition == 1:
        return m.fixed_goal
    rng = stable_rng("goal", seed)
    keys = sorted(m.goal_posterior)
    probs = [m.goal_posterior[k] for k in keys]
    key = rng.choices(keys, probs)[0]
    return m.goal_by_key(key)


def assimilate(m: Mind, o_r: W.Observation, u_h: U.Utterance | None,
               u_r_sent: U.Utterance | None, template: W.WorldState,
               cfg: AssistConfig) -> Mind:
    """Multimodal mental update: own belief from observation and the human's
    message; each particle from a sampled hypothetical human observation and
    the robot's own last share."""
    m.belief = B.update_from_observation(m.belief, o_r)
    if u_h is not None and u_h.kind == U.SHARE:
        try:
            m.belief = B.update_from_message(
                m.belief, (u_h.substate, u_h.content_dist()))
        except (KeyError, ValueError):
            log.info("ignoring malformed share for %r", u_h.substate)
    if m.human_id in o_r.agents:
        m.human_room = o_r.agents[m.human_id][0]

    new_particles = []
    for l, particle in enumerate(m.particles):
        rng = stable_rng("assimilate", cfg.seed, m.step_count, l)
        sampled = P.determinize(m.belief, template, rng,
                                other_rooms={m.human_id: m.human_room,
                                             m.robot_id: m.belief.own_room})
        hypo_obs = W.observe(sampled, m.human_id)
        particle = B.update_from_observation(particle, hypo_obs)
        if u_r_sent is not None and u_r_sent.kind == U.SHARE:
            particle = B.update_from_message(
                particle, (u_r_sent.substate, u_r_sent.content_dist()))
        new_particles.append(particle)
    m.particles = new_particles
    return m


def inferred_human_knowledge(m: Mind, h_max: float) -> set[str]:
    """Union over particles of known sub-state ids."""
    out: set[str] = set()
    for particle in m.particles:
        out |= set(B.knowledge(particle, h_max))
    return out
