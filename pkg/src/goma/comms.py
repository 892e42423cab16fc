"""Communication decision core.

Scores candidate share/request utterances by the KL divergence they would
induce between the (expected) plan after and before the communication, minus
a per-step communication cost, and picks the argmax over
{None} ∪ shares ∪ requests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import belief as B
from . import mind as M
from . import planner as P
from . import utterances as U
from . import world as W
from .config import AssistConfig

_KIND_RANK = {None: 0, U.SHARE: 1, U.REQUEST: 2}


@dataclass
class ProxyReward:
    utterance: U.Utterance | None
    kl: float
    cost: float

    @property
    def net(self) -> float:
        if self.utterance is None:
            return 0.0
        return self.kl - self.cost


def kl_divergence(p: P.Policy, q: P.Policy) -> float:
    """KL(p || q) in nats over a shared action support."""
    if set(p.probs) != set(q.probs):
        raise ValueError("policies have mismatched action supports")
    total = 0.0
    for a, pa in p.probs.items():
        if pa > 0.0:
            total += pa * math.log(pa / q.probs[a])
    return total


def mean_policy(policies: list[P.Policy]) -> P.Policy:
    n = len(policies)
    probs: dict[W.Action, float] = {}
    for pol in policies:
        for a, pa in pol.probs.items():
            probs[a] = probs.get(a, 0.0) + pa / n
    total = sum(probs.values())
    probs = {a: pa / total for a, pa in probs.items()}
    cost = sum(pol.expected_cost for pol in policies) / n
    return P.Policy(probs=probs, tau=policies[0].tau, expected_cost=cost,
                    exploratory=any(pol.exploratory for pol in policies))


def _dists_equal(d1: dict, d2: dict, tol: float = 0.0) -> bool:
    keys = set(d1) | set(d2)
    return all(abs(d1.get(k, 0.0) - d2.get(k, 0.0)) <= tol for k in keys)


def reward_share(s_n: str, m: M.Mind, goals: list[W.Goal],
                 template: W.WorldState, cfg: AssistConfig,
                 universe: tuple[W.Action, ...]) -> ProxyReward:
    """Reward for sharing the robot's knowledge of sub-state s_n."""
    content = m.belief.dist[s_n]
    other = {m.human_id: m.human_room}
    pre, post = [], []
    for particle, goal in zip(m.particles, goals):
        p_pre = P.plan(particle, goal, m.human_id, template, cfg.planner,
                       universe, other_rooms=other)
        if _dists_equal(particle.dist[s_n], content):
            p_post = p_pre
        else:
            merged = B.merge(particle, (s_n, content))
            p_post = P.plan(merged, goal, m.human_id, template, cfg.planner,
                            universe, other_rooms=other)
        pre.append(p_pre)
        post.append(p_post)
    kl = kl_divergence(mean_policy(post), mean_policy(pre))
    return ProxyReward(U.make_share(s_n, content), kl, cfg.comm_cost)


def reward_request(s_n: str, m: M.Mind, goals: list[W.Goal],
                   template: W.WorldState, cfg: AssistConfig,
                   universe: tuple[W.Action, ...]) -> ProxyReward:
    """Reward for requesting the human's (inferred) knowledge of s_n."""
    pre, post = [], []
    for particle, goal in zip(m.particles, goals):
        p_pre = P.plan(m.belief, goal, m.robot_id, template, cfg.planner,
                       universe)
        if _dists_equal(m.belief.dist[s_n], particle.dist[s_n]):
            p_post = p_pre
        else:
            merged = B.merge(m.belief, (s_n, particle.dist[s_n]))
            p_post = P.plan(merged, goal, m.robot_id, template, cfg.planner,
                            universe)
        pre.append(p_pre)
        post.append(p_post)
    kl = kl_divergence(mean_policy(post), mean_policy(pre))
    return ProxyReward(U.make_request(s_n), kl, cfg.comm_cost)


def select_utterance(rewards: list[ProxyReward]) -> ProxyReward:
    """Argmax by net reward; ties broken None ≺ Share ≺ Request, then by
    sub-state id."""
    def sort_key(r: ProxyReward):
        kind = r.utterance.kind if r.utterance else None
        sid = r.utterance.substate if r.utterance else ""
        return (-r.net, _KIND_RANK[kind], sid)
    return min(rewards, key=sort_key)


def select_action(policies: list[P.Policy],
                  legal: set[W.Action] | None = None) -> W.Action:
    """Argmax of the mean policy; lexicographic tie-break on encoding."""
    return mean_policy(policies).argmax(allowed=legal)


def step(m: M.Mind, o_r: W.Observation, template: W.WorldState,
         cfg: AssistConfig, u_h: U.Utterance | None = None,
         a_h: W.Action | None = None,
         legal: set[W.Action] | None = None,
         ) -> tuple[W.Action, U.Utterance | None, M.Mind, dict]:
    """One full decision step: assimilate, infer, plan, score, select."""
    robot_universe = W.action_universe(template, m.robot_id)
    human_universe = W.action_universe(template, m.human_id)

    m = M.assimilate(m, o_r, u_h, m.last_sent, template, cfg)
    m = M.update_goal_posterior(m, a_h, u_h, template, cfg,
                                universe=human_universe)

    k_r = B.knowledge(m.belief, cfg.h_max)
    goals = [M.sample_goal(m, (cfg.seed, m.step_count, l))
             for l in range(len(m.particles))]

    k_h_hat = M.inferred_human_knowledge(m, cfg.h_max)
    rewards: list[ProxyReward] = [ProxyReward(None, 0.0, 0.0)]
    for sid in sorted(k_r):
        rewards.append(reward_share(sid, m, goals, template, cfg,
                                    human_universe))
    for sid in sorted(k_h_hat):
        if sid in k_r:
            continue  # never ask about what the robot already knows
        rewards.append(reward_request(sid, m, goals, template, cfg,
                                      robot_universe))

    chosen = select_utterance(rewards)
    robot_policies = [P.plan(m.belief, g, m.robot_id, template, cfg.planner,
                             robot_universe) for g in goals]
    action = select_action(robot_policies, legal=legal)

    m.last_sent = chosen.utterance
    m.step_count += 1
    trace = {
        "candidates": [
            {"utterance": r.utterance.to_json() if r.utterance else None,
             "kl": r.kl, "net": r.net} for r in rewards],
        "chosen": chosen.utterance.to_json() if chosen.utterance else None,
        "goal_posterior": dict(m.goal_posterior),
        "exploratory": any(p.exploratory for p in robot_policies),
    }
    return action, chosen.utterance, m, trace
