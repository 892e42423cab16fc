"""Acceptance gate: directional suite results, oracle equivalence,
property suites, metric exactness, and cost monotonicity.

Each test asserts one acceptance criterion with pinned tolerances.  The
directional tests run the full bundled suite once (module-scoped) and are
the slow part of this file; everything else is seconds.
"""
import copy
import math
import random
import time
from dataclasses import replace

import pytest

import goma.agents as A
import goma.belief as B
import goma.comms as C
import goma.harness as H
import goma.mind as M
import goma.planner as P
import goma.utterances as U
import goma.world as W
from goma import bundled_scenario_names, load_bundled_scenario
from goma.config import AssistConfig, suite_config
from tests.test_world import small_state

SIGN_ALPHA = 0.05
SUITE_SECONDS_CAP = 600


# ---------------------------------------------------------------------------
# directional reproduction (one suite run shared by several tests)

@pytest.fixture(scope="module")
def suite_result():
    scenarios = [load_bundled_scenario(n) for n in bundled_scenario_names()
                 if not n.startswith("tiny_")]
    t0 = time.time()
    out = H.run_suite(scenarios, list(range(10)), suite_config())
    out["wall_seconds"] = time.time() - t0
    return out


def pooled(rows, condition):
    """Per (scenario, seed) total costs for one condition, sorted."""
    return {(r.scenario, r.seed): r.total_cost for r in rows
            if r.condition == condition}


def paired_p(rows, baseline, family=None):
    goma = pooled(rows, "goma")
    base = pooled(rows, baseline)
    pairs = [(goma[k], base[k]) for k in sorted(goma)
             if k in base and (family is None or k[0].startswith(family))]
    return H.sign_test(pairs), pairs


def test_suite_runtime_under_ten_minutes(suite_result):
    assert suite_result["wall_seconds"] < SUITE_SECONDS_CAP


def test_goma_beats_nocomm(suite_result):
    rows = suite_result["rows"]
    p, pairs = paired_p(rows, "nocomm")
    mean_g = sum(a for a, _ in pairs) / len(pairs)
    mean_b = sum(b for _, b in pairs) / len(pairs)
    assert mean_g < mean_b
    assert p < SIGN_ALPHA


def test_goma_beats_heurcomm_on_kitchens(suite_result):
    rows = suite_result["rows"]
    p, pairs = paired_p(rows, "heur", family="kitchen")
    mean_g = sum(a for a, _ in pairs) / len(pairs)
    mean_b = sum(b for _, b in pairs) / len(pairs)
    assert mean_g < mean_b
    assert p < SIGN_ALPHA


def test_goma_beats_goalagnostic_on_households(suite_result):
    rows = suite_result["rows"]
    p, pairs = paired_p(rows, "goalag", family="household")
    mean_g = sum(a for a, _ in pairs) / len(pairs)
    mean_b = sum(b for _, b in pairs) / len(pairs)
    assert mean_g < mean_b
    assert p < SIGN_ALPHA


def test_goma_speedup_positive_in_both_collaborative_conditions(suite_result):
    """Condition 1 (kitchen, shared goal) and condition 2 (household,
    inferred goal) both show positive mean speedup for the assistant."""
    rows = [r for r in suite_result["rows"] if r.condition == "goma"]
    for family in ("kitchen", "household"):
        speedups = [r.speedup for r in rows if r.scenario.startswith(family)]
        assert speedups
        assert sum(speedups) / len(speedups) > 0.0


def test_kitchen_coldness_ordering(suite_result):
    rows = suite_result["rows"]

    def mean_coldness(condition):
        vals = [r.coldness for r in rows
                if r.condition == condition and
                r.scenario.startswith("kitchen")]
        return sum(vals) / len(vals)

    goma = mean_coldness("goma")
    assert goma <= mean_coldness("heur")
    assert goma <= mean_coldness("nocomm")


# ---------------------------------------------------------------------------
# oracle equivalence on the tiny instances

def _np_kl(p: dict, q: dict) -> float:
    import numpy as np
    keys = sorted(p, key=str)
    pa = np.array([p[k] for k in keys])
    qa = np.array([q[k] for k in keys])
    mask = pa > 0
    return float(np.sum(pa[mask] * np.log(pa[mask] / qa[mask])))


def _np_mean(dists: list[dict]) -> dict:
    keys = sorted(dists[0], key=str)
    out = {k: sum(d[k] for d in dists) / len(dists) for k in keys}
    z = sum(out.values())
    return {k: v / z for k, v in out.items()}


def oracle_utterance(m, template, cfg):
    """Independent brute force over {None} + shares(K_R) + requests(K_H\\K_R).

    Mirrors the decision layer's inputs (post-assimilate mind, the same
    sampled goals) but recomputes every reward, the expectation, the KL,
    and the argmax from scratch.
    """
    k_r = B.knowledge(m.belief, cfg.h_max)
    k_h = M.inferred_human_knowledge(m, cfg.h_max)
    goals = [M.sample_goal(m, (cfg.seed, m.step_count, l))
             for l in range(len(m.particles))]
    human_u = W.action_universe(template, m.human_id)
    robot_u = W.action_universe(template, m.robot_id)
    other = {m.human_id: m.human_room}

    def human_plan(b, g):
        return P.plan(b, g, m.human_id, template, cfg.planner, human_u,
                      other_rooms=other).probs

    def robot_plan(b, g):
        return P.plan(b, g, m.robot_id, template, cfg.planner, robot_u).probs

    scored = [(0.0, 0, "")]  # (net, kind rank, sid) for None
    for sid in sorted(k_r):
        content = m.belief.dist[sid]
        pre = [human_plan(p, g) for p, g in zip(m.particles, goals)]
        post = [human_plan(B.merge(p, (sid, content)), g)
                for p, g in zip(m.particles, goals)]
        net = _np_kl(_np_mean(post), _np_mean(pre)) - cfg.comm_cost
        scored.append((net, 1, sid))
    for sid in sorted(k_h):
        if sid in k_r:
            continue
        pre = [robot_plan(m.belief, g) for g in goals]
        post = [robot_plan(B.merge(m.belief, (sid, p.dist[sid])), g)
                for p, g in zip(m.particles, goals)]
        net = _np_kl(_np_mean(post), _np_mean(pre)) - cfg.comm_cost
        scored.append((net, 2, sid))
    best = min(scored, key=lambda t: (-t[0], t[1], t[2]))
    if best[1] == 0:
        return None
    return (U.SHARE if best[1] == 1 else U.REQUEST, best[2])


@pytest.mark.parametrize("name", ["tiny_household", "tiny_kitchen"])
def test_oracle_equivalence(name):
    scenario = load_bundled_scenario(name)
    mismatches = 0
    checked = 0
    for seed in range(20):
        P.clear_plan_cache()
        cfg = replace(suite_config(seed), condition=scenario.condition,
                      particles=2,
                      planner=replace(suite_config().planner, samples=2))
        state = scenario.initial_state()
        human, robot = scenario.human_id, scenario.robot_id
        goal = scenario.true_goal()
        fixed = goal if scenario.condition == 1 else None
        assistant = A.GomaAssistant(state, robot, human,
                                    scenario.goal_space(), cfg,
                                    fixed_goal=fixed,
                                    known=scenario.known(robot))
        proxy = A.HumanProxy(state, human, goal, cfg.planner, seed,
                             condition=scenario.condition,
                             known=scenario.known(human))
        to_robot = None
        for _ in range(8):
            if W.goal_satisfied(state, goal):
                break
            obs_r = W.observe(state, robot)
            legal_r = W.legal_actions(state, robot)
            # oracle operates on an identical pre-step mind copy
            shadow = copy.deepcopy(assistant.mind)
            shadow = M.assimilate(shadow, obs_r, to_robot,
                                  shadow.last_sent, assistant.template, cfg)
            shadow = M.update_goal_posterior(
                shadow, None, to_robot, assistant.template, cfg,
                universe=W.action_universe(assistant.template, human))
            want = oracle_utterance(shadow, assistant.template, cfg)

            a_r, u_r = assistant.step(obs_r, to_robot, legal_r)
            got = None if u_r is None else (u_r.kind, u_r.substate)
            checked += 1
            if got != want:
                mismatches += 1

            a_h, u_h = proxy.step(W.observe(state, human), u_r,
                                  W.legal_actions(state, human))
            to_robot = u_h
            state, _ = W.step(state, {human: a_h, robot: a_r})
    assert checked > 0
    assert mismatches == 0


# ---------------------------------------------------------------------------
# property suites

def random_belief(rng):
    state = small_state()
    frame = B.Frame.of(state)
    b = B.init_uniform(state, "human", frame)
    for sid in frame.substate_ids():
        dom = frame.domain(sid)
        raw = [rng.random() ** 4 + 1e-12 for _ in dom]
        z = sum(raw)
        b = B.merge(b, (sid, {v: w / z for v, w in zip(dom, raw)}))
    return b, frame


def test_kl_properties_thousand_pairs():
    rng = random.Random(42)
    actions = tuple(W.Action(W.MOVE, f"r{i}") for i in range(6))
    for _ in range(1000):
        raw_p = [rng.random() + 1e-9 for _ in actions]
        raw_q = [rng.random() + 1e-9 for _ in actions]
        p = P.Policy({a: v / sum(raw_p) for a, v in zip(actions, raw_p)},
                     1.0, 0.0)
        q = P.Policy({a: v / sum(raw_q) for a, v in zip(actions, raw_q)},
                     1.0, 0.0)
        assert C.kl_divergence(p, q) >= 0.0
        assert C.kl_divergence(p, p) == 0.0


def test_knowledge_monotone_500_random_beliefs():
    rng = random.Random(7)
    thresholds = (0.05, 0.2, 0.5, 1.0, 2.0)
    for _ in range(500):
        b, _ = random_belief(rng)
        sets = [set(B.knowledge(b, h)) for h in thresholds]
        for small, large in zip(sets, sets[1:]):
            assert small <= large


def test_merge_idempotent_and_local_500_cases():
    rng = random.Random(11)
    for _ in range(500):
        b, frame = random_belief(rng)
        sid = rng.choice(frame.substate_ids())
        dom = frame.domain(sid)
        raw = [rng.random() + 1e-12 for _ in dom]
        z = sum(raw)
        content = {v: w / z for v, w in zip(dom, raw)}
        once = B.merge(b, (sid, content))
        twice = B.merge(once, (sid, content))
        assert once.dist == twice.dist          # idempotence
        for other in frame.substate_ids():      # locality
            if other != sid:
                assert once.dist[other] == b.dist[other]
        assert B.check_normalized(once)


def test_none_dominance_aligned_beliefs_50_scenarios():
    """When every particle matches the robot's belief exactly, every
    share/request has zero KL, so any C > 0 makes None the argmax."""
    rng = random.Random(13)
    state = small_state()
    goals = [W.Goal(W.HOUSEHOLD, "g", predicates=(
        W.Predicate("apple", 1, ("table.1",)),))]
    for trial in range(50):
        cost = 10 ** rng.uniform(-3, 1)
        cfg = AssistConfig(
            planner=P.PlannerConfig(samples=2), comm_cost=cost,
            particles=2, seed=trial)
        m = M.init_mind(state, "robot", "human", goals, cfg)
        b, frame = random_belief(rng)
        m.belief = B.Belief0("robot", frame, dict(b.dist),
                             m.belief.own_room, None)
        m.particles = [B.Belief0("human", frame, dict(b.dist),
                                 p.own_room, None) for p in m.particles]
        sampled = [goals[0]] * cfg.particles
        human_u = W.action_universe(state, "human")
        robot_u = W.action_universe(state, "robot")
        rewards = [C.ProxyReward(None, 0.0, 0.0)]
        k_r = B.knowledge(m.belief, cfg.h_max)
        for sid in sorted(k_r):
            rewards.append(C.reward_share(sid, m, sampled, state, cfg,
                                          human_u))
        for sid in sorted(M.inferred_human_knowledge(m, cfg.h_max)):
            if sid in k_r:
                continue
            rewards.append(C.reward_request(sid, m, sampled, state, cfg,
                                            robot_u))
        chosen = C.select_utterance(rewards)
        assert chosen.utterance is None
        for r in rewards[1:]:
            assert r.kl == 0.0


def test_normalization_10000_fuzzed_operations():
    rng = random.Random(99)
    state = small_state()
    frame = B.Frame.of(state)
    b = B.init_uniform(state, "human", frame)
    locs = list(frame.locations())
    sids = list(frame.substate_ids())
    for i in range(10000):
        op = rng.randrange(4)
        if op == 0:
            state.agents["human"].room = rng.choice(sorted(state.rooms))
            b = B.update_from_observation(b, W.observe(state, "human"))
        elif op == 1:
            oid = rng.choice(["apple.3", "plate.7"])
            loc = rng.choice(locs)
            st = rng.choice(frame.statuses())
            b = B.update_from_message(b, (oid, {(loc, st): 1.0}))
        elif op == 2:
            sid = rng.choice(sids)
            dom = frame.domain(sid)
            raw = [rng.random() + 1e-12 for _ in dom]
            z = sum(raw)
            b = B.merge(b, (sid, {v: w / z for v, w in zip(dom, raw)}))
        else:
            cid = rng.choice(["fridge.10", "cabinet.11"])
            state.containers[cid]["open"] = rng.random() < 0.5
            b = B.update_from_observation(b, W.observe(state, "human"))
        for sid, dist in b.dist.items():
            assert abs(sum(dist.values()) - 1.0) <= 1e-9


def test_hand_bayes_three_step_example(monkeypatch):
    goals = [W.Goal(W.HOUSEHOLD, f"g{i}", predicates=(
        W.Predicate("apple", 1, ("table.1",)),)) for i in range(4)]
    state = small_state()
    cfg = AssistConfig(particles=3)
    m = M.init_mind(state, "robot", "human", goals, cfg)

    monkeypatch.setattr(
        P, "action_likelihood",
        lambda action, b, goal, *a, **k: 0.8 if goal.key() == "g0" else 0.1)
    for _ in range(3):
        m = M.update_goal_posterior(m, W.WAIT_ACTION, None, state, cfg)
    want = 0.8 ** 3 / (0.8 ** 3 + 3 * 0.1 ** 3)
    assert abs(m.goal_posterior["g0"] - want) <= 1e-9


def test_seed_determinism_byte_identical_episodes():
    cfg = replace(suite_config(3), particles=2,
                  planner=replace(suite_config().planner, samples=2))
    for name in ("tiny_household", "tiny_kitchen"):
        scenario = load_bundled_scenario(name)
        runs = [H.run_episode(scenario, "goma", 3, cfg, t_max=25)
                for _ in range(2)]
        assert runs[0].to_json_lines() == runs[1].to_json_lines()


# ---------------------------------------------------------------------------
# metric exactness and cost monotonicity

def test_metric_formula_exactness():
    assert H.speedup(30, 20) == pytest.approx(0.5, abs=1e-12)
    assert H.total_cost(12, 2, [8, 10]) == 20


def test_utterances_nonincreasing_in_comm_cost():
    """Replay one fixed seeded action prefix under rising C."""
    scenario = load_bundled_scenario("tiny_household")
    base_cfg = replace(suite_config(4), particles=2,
                       planner=replace(suite_config().planner, samples=2))
    reference = H.run_episode(scenario, "goma", 4, base_cfg, t_max=20)
    prefix = [{aid: W.Action.decode(a) for aid, a in rec.actions.items()}
              for rec in reference.records]

    counts = []
    for cost in (0.5, 1.0, 2.0, 4.0):
        P.clear_plan_cache()
        cfg = replace(base_cfg, comm_cost=cost)
        state = scenario.initial_state()
        robot, human = scenario.robot_id, scenario.human_id
        assistant = A.GomaAssistant(state, robot, human,
                                    scenario.goal_space(), cfg,
                                    known=scenario.known(robot))
        n = 0
        for actions in prefix:
            obs = W.observe(state, robot)
            legal = W.legal_actions(state, robot)
            _, utterance = assistant.step(obs, None, legal)
            n += utterance is not None
            state, _ = W.step(state, actions)
        counts.append(n)
    assert counts == sorted(counts, reverse=True)
    assert counts[0] > counts[-1] or counts[0] == 0
