"""HITL session server: protocol flow, phases, persistence."""
import json

import pytest
from starlette.testclient import TestClient

import goma.service as S


@pytest.fixture
def client(tmp_path):
    app = S.build_app(out_dir=tmp_path, seed=0)
    with TestClient(app) as c:
        c.out_dir = tmp_path
        yield c


def join(ws, scenario="tiny_household", condition="goma"):
    ws.send_text(json.dumps({"kind": "join", "scenario": scenario,
                             "condition": condition}))
    info = json.loads(ws.receive_text())
    update = json.loads(ws.receive_text())
    assert info["kind"] == "session_info"
    assert update["kind"] == "state_update"
    return info, update["view"]


def act(ws, action):
    ws.send_text(json.dumps({"kind": "act", "action": action}))
    events = []
    while True:
        ev = json.loads(ws.receive_text())
        events.append(ev)
        if ev["kind"] in ("state_update", "reject"):
            return events


RATINGS = {"helpful": 5, "understands_goal": 6,
           "useful_communication": 4, "over_communication": 2}


def test_join_then_state_update(client):
    with client.websocket_connect("/ws") as ws:
        info, view = join(ws)
        assert info["scenario"] == "tiny_household"
        assert info["condition"] == "goma"
        assert view["phase"] == "running"
        assert view["clock"] == 0
        assert "wait" in view["legal_actions"]


def test_lockstep_clock_counts_accepted_acts(client):
    with client.websocket_connect("/ws") as ws:
        _, view = join(ws)
        accepted = 0
        for _ in range(5):
            events = act(ws, view["legal_actions"][0])
            last = events[-1]
            if last["kind"] == "state_update":
                accepted += 1
                view = last["view"]
                if view["phase"] != "running":
                    break
        assert view["clock"] == accepted


def test_illegal_action_rejected_with_legal_list(client):
    with client.websocket_connect("/ws") as ws:
        _, view = join(ws)
        events = act(ws, "move:narnia")
        assert events[-1]["kind"] == "reject"
        assert set(events[-1]["legal"]) == set(view["legal_actions"])


def test_malformed_and_out_of_phase_messages(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_text(json.dumps({"kind": "act", "action": "wait"}))
        assert json.loads(ws.receive_text())["kind"] == "reject"
        ws.send_text("this is not json")
        assert json.loads(ws.receive_text())["kind"] == "reject"
        join(ws)
        ws.send_text(json.dumps({"kind": "rate", "ratings": RATINGS}))
        rej = json.loads(ws.receive_text())
        assert rej["kind"] == "reject"  # rating before the trial ends


def test_object_form_action_accepted(client):
    with client.websocket_connect("/ws") as ws:
        join(ws)
        events = act(ws, {"type": "wait"})
        assert events[-1]["kind"] == "state_update"


def test_chat_is_parsed_and_logged(client, caplog):
    with client.websocket_connect("/ws") as ws:
        join(ws)
        ws.send_text(json.dumps({"kind": "chat",
                                 "text": "complete nonsense here"}))
        ws.send_text(json.dumps({"kind": "chat",
                                 "text": "where is plate.7?"}))
        events = act(ws, "wait")
        assert events[-1]["kind"] == "state_update"


def test_occlusion_in_view(client):
    """A closed container's contents never appear in the client view."""
    with client.websocket_connect("/ws") as ws:
        _, view = join(ws)
        closed = [c["id"] for c in view["containers"] if not c["open"]]
        assert closed  # tiny_household starts with closed containers
        for c in view["containers"]:
            if not c["open"]:
                assert c["contents"] is None
        visible_locs = {c["id"] for c in view["containers"] if c["open"]}
        visible_locs |= {s["id"] for s in view["surfaces"]}
        visible_locs |= set(view["agents"])
        for oid, spec in view["objects"].items():
            assert spec["location"] in visible_locs


def run_to_rating(ws, max_steps=60):
    _, view = join(ws)
    for _ in range(max_steps):
        events = act(ws, view["legal_actions"][0])
        view = events[-1].get("view", view)
        if view["phase"] == "rating":
            return view
    raise AssertionError("episode never ended")


def test_full_trial_with_rating(client):
    with client.websocket_connect("/ws") as ws:
        run_to_rating(ws)
        ws.send_text(json.dumps({"kind": "rate", "ratings": RATINGS}))
        done = json.loads(ws.receive_text())
        assert done["kind"] == "trial_done"
    lines = (client.out_dir / "ratings.csv").read_text().splitlines()
    assert lines[0].startswith("session,scenario,condition")
    assert lines[1].endswith("5,6,4,2")
    logs = list(client.out_dir.glob("s*.jsonl"))
    assert any(not p.name.endswith("_chat.jsonl") for p in logs)


def test_rating_validation(client):
    with client.websocket_connect("/ws") as ws:
        run_to_rating(ws)
        bad = dict(RATINGS, helpful=9)
        ws.send_text(json.dumps({"kind": "rate", "ratings": bad}))
        assert json.loads(ws.receive_text())["kind"] == "reject"
        ws.send_text(json.dumps({"kind": "rate",
                                 "ratings": {"helpful": 5}}))
        assert json.loads(ws.receive_text())["kind"] == "reject"
        ws.send_text(json.dumps({"kind": "rate", "ratings": RATINGS}))
        assert json.loads(ws.receive_text())["kind"] == "trial_done"
        # phase is now done; further messages are out-of-phase
        ws.send_text(json.dumps({"kind": "act", "action": "wait"}))
        assert json.loads(ws.receive_text())["kind"] == "reject"


def test_condition_none_runs_without_assistant(client):
    with client.websocket_connect("/ws") as ws:
        info, view = join(ws, condition="none")
        assert info["condition"] == "none"
        events = act(ws, view["legal_actions"][0])
        assert events[-1]["kind"] == "state_update"
        assert all(e["kind"] != "assistant_chat" for e in events)


def test_latin_square_rotation():
    square = S.latin_square(seed=3)
    n = len(S.CONDITION_CYCLE)
    assert len(square) == n
    for row in square:
        assert sorted(row) == sorted(S.CONDITION_CYCLE)
    for col in range(n):
        assert sorted(row[col] for row in square) == \
            sorted(S.CONDITION_CYCLE)
    assert S.latin_square(seed=3) == square  # seeded, stable


def test_hub_assigns_conditions_in_rotation(tmp_path):
    hub = S.SessionHub(out_dir=tmp_path, seed=1)
    seen = [hub.create("tiny_household").condition
            for _ in range(len(S.CONDITION_CYCLE))]
    assert sorted(seen) == sorted(S.CONDITION_CYCLE)
