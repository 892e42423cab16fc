"""Session server for human-in-the-loop episodes.

One WebSocket per session carries newline-delimited JSON both ways.
Client messages: join, act, chat, rate.  Server messages: session_info,
state_update, assistant_chat, reject, trial_done.

The world is lock-step: it advances exactly once per accepted act, taking
the human's action and the assistant's action together.  Free-text chat is
parsed by the template grammar; unparseable text is logged and ignored.
"""
from __future__ import annotations

import csv
import itertools
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from . import agents as A
from . import belief as B
from . import harness as H
from . import utterances as U
from . import world as W
from .config import AssistConfig, suite_config
from .rngutil import stable_rng

log = logging.getLogger(__name__)

CONDITION_CYCLE = ("goma", "nocomm", "heur", "goalag", "none")
RATING_CRITERIA = ("helpful", "understands_goal", "useful_communication",
                   "over_communication")

LOBBY, RUNNING, RATING, DONE = "lobby", "running", "rating", "done"


def latin_square(seed: int, n: int = len(CONDITION_CYCLE)) -> list[list[str]]:
    """Seeded Latin square of condition orders, one row per participant."""
    rng = stable_rng("latin", seed)
    base = list(CONDITION_CYCLE)
    rng.shuffle(base)
    return [[base[(i + j) % n] for j in range(n)] for i in range(n)]


@dataclass
class SessionState:
    session_id: str
    scenario: H.Scenario
    condition: str
    cfg: AssistConfig
    state: W.WorldState
    assistant: object | None
    human_id: str
    robot_id: str | None
    phase: str = RUNNING
    t_max: int = H.T_MAX
    pending_chat: U.Utterance | None = None
    a_h_visible: W.Action | None = None
    transcript: list[dict] = field(default_factory=list)
    records: list[H.StepRecord] = field(default_factory=list)
    outcome: str = "timeout"

    @property
    def chat_enabled(self) -> bool:
        return self.condition not in ("none", "nocomm")

    @property
    def clock(self) -> int:
        return self.state.clock


def _view(session: SessionState) -> dict:
    """The human's partial observation, mirrored for the client."""
    obs = W.observe(session.state, session.human_id)
    state = session.state
    legal = sorted(a.encode()
                   for a in W.legal_actions(state, session.human_id))
    containers = [
        {"id": cid, "open": bool(is_open),
         "contents": state.contents(cid) if is_open else None}
        for cid, is_open in sorted(obs.container_flags.items())]
    surfaces = [
        {"id": sid, "serving": bool(spec.get("serving", False)),
         "contents": state.contents(sid)}
        for sid, spec in sorted(state.surfaces.items())
        if spec["room"] == obs.room]
    objects = {oid: {"location": loc, "status": status}
               for oid, (loc, status) in sorted(obs.objects.items())}
    return {
        "clock": obs.clock,
        "room": obs.room,
        "rooms": sorted(state.rooms),
        "held": state.agents[session.human_id].held,
        "objects": objects,
        "containers": containers,
        "surfaces": surfaces,
        "agents": {aid: {"room": r, "held": h}
                   for aid, (r, h) in sorted(obs.agents.items())},
        "legal_actions": legal,
        "phase": session.phase,
    }


class SessionHub:
    """Owns all sessions and their persistence."""

    def __init__(self, scenarios: list[H.Scenario] | None = None,
                 out_dir: Path | str = "sessions", seed: int = 0,
                 cfg: AssistConfig | None = None, t_max: int = H.T_MAX):
        if scenarios is None:
            from . import bundled_scenario_names, load_bundled_scenario
            scenarios = [load_bundled_scenario(n)
                         for n in bundled_scenario_names()]
        self.scenarios = {s.name: s for s in scenarios}
        self.out_dir = Path(out_dir)
        self.seed = seed
        self.cfg = cfg or suite_config(seed)
        self.t_max = t_max
        self.sessions: dict[str, SessionState] = {}
        self._counter = itertools.count()
        self._square = latin_square(seed)

    def _next_condition(self, index: int) -> str:
        row = self._square[(index // len(CONDITION_CYCLE)) % len(self._square)]
        return row[index % len(CONDITION_CYCLE)]

    def create(self, scenario_name: str | None = None,
               condition: str | None = None) -> SessionState:
        index = next(self._counter)
        if scenario_name is None:
            names = sorted(self.scenarios)
            scenario_name = names[index % len(names)]
        if scenario_name not in self.scenarios:
            raise KeyError(f"unknown scenario {scenario_name!r}")
        scenario = self.scenarios[scenario_name]
        condition = condition or self._next_condition(index)
        if condition not in CONDITION_CYCLE:
            raise KeyError(f"unknown condition {condition!r}")

        from dataclasses import replace
        cfg = replace(self.cfg, seed=self.seed + index,
                      condition=scenario.condition)
        state = scenario.initial_state()
        human = scenario.human_id
        robot = scenario.robot_id
        assistant = None
        if condition == "none":
            if robot is not None:
                del state.agents[robot]
            robot = None
        else:
            assistant = H._build_assistant(scenario, state, condition, cfg)
        session = SessionState(
            session_id=f"s{index:04d}", scenario=scenario,
            condition=condition, cfg=cfg, state=state, assistant=assistant,
            human_id=human, robot_id=robot, t_max=self.t_max)
        self.sessions[session.session_id] = session
        return session

    # ------------------------------------------------------------------
    # message handling; returns a list of server events

    def handle(self, session: SessionState | None, msg: dict) -> list[dict]:
        kind = msg.get("kind")
        if kind == "join":
            raise ValueError("join must be the first message only")
        if session is None:
            return [_reject("no session; send join first")]
        if kind == "act":
            return self._handle_act(session, msg)
        if kind == "chat":
            return self._handle_chat(session, msg)
        if kind == "rate":
            return self._handle_rate(session, msg)
        return [_reject(f"unknown message kind {kind!r}")]

    def _handle_act(self, session: SessionState, msg: dict) -> list[dict]:
        if session.phase != RUNNING:
            return [_reject(f"act not allowed in phase {session.phase}")]
        raw = msg.get("action")
        try:
            if isinstance(raw, dict):
                action = W.Action(raw["type"], raw.get("target"),
                                  raw.get("dest"))
            else:
                action = W.Action.decode(str(raw))
        except Exception:
            return [_reject("malformed action")]
        legal = W.legal_actions(session.state, session.human_id)
        if action not in legal:
            return [_reject("illegal action",
                            legal=sorted(a.encode() for a in legal))]

        events: list[dict] = []
        actions = {session.human_id: action}
        utterances: dict[str, dict | None] = {session.human_id: None}
        texts = {session.human_id: ""}
        u_r = None
        same_room = False
        if session.assistant is not None:
            obs_r = W.observe(session.state, session.robot_id)
            legal_r = W.legal_actions(session.state, session.robot_id)
            incoming = session.pending_chat if session.chat_enabled else None
            a_r, u_r = session.assistant.step(obs_r, incoming, legal_r,
                                              a_h=session.a_h_visible)
            session.pending_chat = None
            if not session.chat_enabled:
                u_r = None
            actions[session.robot_id] = a_r
            utterances[session.robot_id] = u_r.to_json() if u_r else None
            frame = B.Frame.of(session.state)
            texts[session.robot_id] = \
                U.render_utterance(u_r, frame) if u_r else ""
            same_room = (session.state.agents[session.human_id].room
                         == session.state.agents[session.robot_id].room)

        session.state, _ = W.step(session.state, actions)
        session.a_h_visible = action if same_room else None
        goal = session.scenario.true_goal()

        record = H.StepRecord(
            clock=session.state.clock,
            actions={a: act.encode() for a, act in actions.items()},
            utterances=utterances, texts=texts)
        session.records.append(record)

        if u_r is not None:
            line = {"from": "assistant",
                    "text": texts[session.robot_id],
                    "clock": session.state.clock}
            session.transcript.append(line)
            events.append({"kind": "assistant_chat", **line})

        if W.goal_satisfied(session.state, goal):
            session.outcome = "goal"
            session.phase = RATING
        elif session.state.clock >= session.t_max:
            session.outcome = "timeout"
            session.phase = RATING
        events.append({"kind": "state_update", "view": _view(session)})
        return events

    def _handle_chat(self, session: SessionState, msg: dict) -> list[dict]:
        if session.phase != RUNNING:
            return [_reject(f"chat not allowed in phase {session.phase}")]
        text = str(msg.get("text", ""))
        session.transcript.append({"from": "human", "text": text,
                                   "clock": session.state.clock})
        frame = B.Frame.of(session.state)
        parsed = U.parse_chat(text, frame)
        if parsed is None:
            log.info("unparseable chat ignored: %r", text)
        else:
            session.pending_chat = parsed
        return []

    def _handle_rate(self, session: SessionState, msg: dict) -> list[dict]:
        if session.phase != RATING:
            return [_reject(f"rate not allowed in phase {session.phase}")]
        ratings = msg.get("ratings", {})
        try:
            values = [int(ratings[c]) for c in RATING_CRITERIA]
        except (KeyError, TypeError, ValueError):
            return [_reject("ratings must cover: "
                            + ", ".join(RATING_CRITERIA))]
        if any(not 1 <= v <= 7 for v in values):
            return [_reject("ratings must be integers in 1..7")]
        self._persist(session, values)
        session.phase = DONE
        return [{"kind": "trial_done", "session": session.session_id}]

    def _persist(self, session: SessionState, values: list[int]) -> None:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        ratings = self.out_dir / "ratings.csv"
        new = not ratings.exists()
        with open(ratings, "a", newline="") as fh:
            w = csv.writer(fh)
            if new:
                w.writerow(("session", "scenario", "condition")
                           + RATING_CRITERIA)
            w.writerow([session.session_id, session.scenario.name,
                        session.condition] + values)
        episode = H.EpisodeLog(
            scenario=session.scenario.name, condition=session.condition,
            seed=session.cfg.seed, records=session.records,
            terminal_clock=session.state.clock, outcome=session.outcome,
            hot_completions=dict(session.state.cook_clock),
            terminal_digest=session.state.digest())
        path = self.out_dir / f"{session.session_id}.jsonl"
        path.write_text("\n".join(episode.to_json_lines()) + "\n")
        transcript = self.out_dir / f"{session.session_id}_chat.jsonl"
        transcript.write_text(
            "\n".join(json.dumps(t, sort_keys=True)
                      for t in session.transcript) + "\n"
            if session.transcript else "")

    def join(self, msg: dict) -> tuple[SessionState, list[dict]]:
        session = self.create(msg.get("scenario"), msg.get("condition"))
        info = {
            "kind": "session_info",
            "session": session.session_id,
            "scenario": session.scenario.name,
            "family": session.scenario.family,
            "condition": session.condition,
            "goal": session.scenario.true_goal().to_json(),
            "rating_criteria": list(RATING_CRITERIA),
            "t_max": session.t_max,
        }
        return session, [info,
                         {"kind": "state_update", "view": _view(session)}]


def _reject(reason: str, **extra) -> dict:
    return {"kind": "reject", "reason": reason, **extra}


def build_app(scenarios: list[H.Scenario] | None = None,
              out_dir: Path | str = "sessions", seed: int = 0,
              cfg: AssistConfig | None = None, t_max: int = H.T_MAX):
    """FastAPI application exposing the session protocol at /ws."""
    hub = SessionHub(scenarios, out_dir, seed, cfg, t_max)
    app = FastAPI(title="goma HITL session server")
    app.state.hub = hub

    @app.get("/health")
    def health():
        return {"ok": True, "sessions": len(hub.sessions)}

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        session = None
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError:
                    await ws.send_text(json.dumps(_reject("invalid JSON")))
                    continue
                try:
                    if msg.get("kind") == "join":
                        if session is not None:
                            events = [_reject("already joined")]
                        else:
                            session, events = hub.join(msg)
                    else:
                        events = hub.handle(session, msg)
                except (KeyError, ValueError) as exc:
                    events = [_reject(str(exc))]
                for event in events:
                    await ws.send_text(json.dumps(event, sort_keys=True))
        except WebSocketDisconnect:
            pass

    return app
