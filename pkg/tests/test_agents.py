"""Human proxy and assistant variants."""
import pytest

import goma.agents as A
import goma.belief as B
import goma.utterances as U
import goma.world as W
from tests.test_world import small_state


def proxy(seed=0, condition=2, known=None, chat=True):
    state = small_state()
    goal = W.Goal(W.HOUSEHOLD, "g", predicates=(
        W.Predicate("apple", 1, ("table.1",)),))
    import goma.planner as P
    p = A.HumanProxy(state, "human", goal, P.PlannerConfig(samples=2),
                     seed, condition=condition, known=known, chat=chat)
    return state, p


def test_proxy_opens_with_goal_hint_condition2():
    state, p = proxy()
    obs = W.observe(state, "human")
    _, u = p.step(obs, None, W.legal_actions(state, "human"))
    assert u is not None and u.kind == U.GOAL_HINT
    assert set(u.categories) <= {"apple"}


def test_proxy_silent_at_start_condition1():
    state, p = proxy(condition=1)
    obs = W.observe(state, "human")
    _, u = p.step(obs, None, W.legal_actions(state, "human"))
    assert u is None


def test_proxy_answers_request_truthfully():
    state, p = proxy(known=["apple.3"])
    obs = W.observe(state, "human")
    p.step(obs, None, W.legal_actions(state, "human"))
    _, reply = p.step(obs, U.make_request("apple.3"),
                      W.legal_actions(state, "human"))
    assert reply.kind == U.SHARE
    assert reply.substate == "apple.3"
    assert dict(reply.content) == {("fridge.10", W.RAW): 1.0}


def test_proxy_admits_ignorance():
    state, p = proxy()
    obs = W.observe(state, "human")
    p.step(obs, None, W.legal_actions(state, "human"))
    _, reply = p.step(obs, U.make_request("apple.3"),
                      W.legal_actions(state, "human"))
    assert reply == U.UNKNOWN_REPLY


def test_proxy_absorbs_share():
    state, p = proxy(condition=1)
    obs = W.observe(state, "human")
    share = U.make_share("apple.3", {("table.1", W.RAW): 1.0})
    p.step(obs, share, W.legal_actions(state, "human"))
    assert p.belief.dist["apple.3"] == {("table.1", W.RAW): 1.0}


def variant_assistant(variant, fast_cfg, scenario):
    state = scenario.initial_state()
    if variant == A.GOMA:
        return state, A.GomaAssistant(
            state, scenario.robot_id, scenario.human_id,
            scenario.goal_space(), fast_cfg,
            known=scenario.known(scenario.robot_id))
    return state, A.BaselineAssistant(
        state, scenario.robot_id, scenario.human_id, scenario.goal_space(),
        variant, fast_cfg, known=scenario.known(scenario.robot_id))


@pytest.mark.parametrize("variant", A.VARIANTS)
def test_variants_step_and_respect_legality(variant, fast_cfg,
                                            tiny_household):
    import goma.planner as P
    P.clear_plan_cache()
    state, assistant = variant_assistant(variant, fast_cfg, tiny_household)
    robot = tiny_household.robot_id
    for _ in range(3):
        legal = W.legal_actions(state, robot)
        obs = W.observe(state, robot)
        action, utterance = assistant.step(obs, None, legal)
        assert action in legal
        state, _ = W.step(state, {robot: action,
                                  tiny_household.human_id: W.WAIT_ACTION})


def test_nocomm_never_utters(fast_cfg, tiny_household):
    import goma.planner as P
    P.clear_plan_cache()
    state, assistant = variant_assistant(A.NOCOMM, fast_cfg, tiny_household)
    robot = tiny_household.robot_id
    for _ in range(6):
        legal = W.legal_actions(state, robot)
        action, utterance = assistant.step(W.observe(state, robot), None,
                                           legal)
        assert utterance is None
        state, _ = W.step(state, {robot: action,
                                  tiny_household.human_id: W.WAIT_ACTION})


def test_heur_requests_on_schedule(fast_cfg, tiny_household):
    import goma.planner as P
    P.clear_plan_cache()
    state, assistant = variant_assistant(A.HEURCOMM, fast_cfg,
                                         tiny_household)
    robot = tiny_household.robot_id
    kinds = []
    for _ in range(A.HEUR_PERIOD + 1):
        legal = W.legal_actions(state, robot)
        action, utterance = assistant.step(W.observe(state, robot), None,
                                           legal)
        kinds.append(utterance.kind if utterance else None)
        state, _ = W.step(state, {robot: action,
                                  tiny_household.human_id: W.WAIT_ACTION})
    assert any(k is not None for k in kinds)


def test_goalag_share_rate_near_half(fast_cfg, tiny_household):
    """Bernoulli(0.5) gate on sharing fresh knowledge."""
    import goma.planner as P
    utter = 0
    steps = 0
    for seed in range(8):
        from dataclasses import replace
        P.clear_plan_cache()
        cfg = replace(fast_cfg, seed=seed)
        state, assistant = variant_assistant(A.GOALAG, cfg, tiny_household)
        robot = tiny_household.robot_id
        for _ in range(4):
            legal = W.legal_actions(state, robot)
            action, utterance = assistant.step(W.observe(state, robot),
                                               None, legal)
            utter += utterance is not None
            steps += 1
            state, _ = W.step(state, {robot: action,
                                      tiny_household.human_id:
                                      W.WAIT_ACTION})
    assert 0 < utter < steps
