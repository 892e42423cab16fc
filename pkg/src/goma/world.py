"""Deterministic two-family gridworld (kitchen / household).

Rooms form a graph; objects live in containers, on surfaces, or in an
agent's hand.  Observability is per-room with closed-container occlusion.
All dynamics are pure functions of (state, actions): no hidden RNG.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

KITCHEN = "kitchen"
HOUSEHOLD = "household"

RAW = "raw"
CHOPPED = "chopped"
COOKED = "cooked"
STATUSES = (RAW, CHOPPED, COOKED)

MOVE = "move"
OPEN = "open"
CLOSE = "close"
GRAB = "grab"
PUT = "put"
CHOP = "chop"
COOK = "cook"
SERVE = "serve"
WAIT = "wait"

# temperature a freshly cooked item starts at; it loses 1 per step
INITIAL_TEMPERATURE = 5


class ScenarioError(ValueError):
    """Raised for malformed scenario configs."""


class IllegalActionError(RuntimeError):
    """Raised when step() receives an action that is not legal."""


@dataclass(frozen=True)
class Action:
    kind: str
    target: str | None = None
    dest: str | None = None

    def encode(self) -> str:
        return ":".join(p for p in (self.kind, self.target, self.dest) if p)

    @staticmethod
    def decode(text: str) -> "Action":
        parts = text.split(":")
        return Action(parts[0],
                      parts[1] if len(parts) > 1 else None,
                      parts[2] if len(parts) > 2 else None)

    def __str__(self) -> str:
        return self.encode()


WAIT_ACTION = Action(WAIT)


@dataclass
class ObjectState:
    oid: str
    category: str
    location: str  # container-id, surface-id, or agent-id
    status: str = RAW
    temperature: int = 0


@dataclass
class AgentState:
    room: str
    held: str | None = None


@dataclass
class WorldState:
    family: str
    rooms: dict[str, tuple[str, ...]]          # room -> adjacent rooms
    containers: dict[str, dict]                # cid -> {"room": r, "open": bool}
    surfaces: dict[str, dict]                  # sid -> {"room": r, "serving": bool}
    objects: dict[str, ObjectState]
    agents: dict[str, AgentState]
    clock: int = 0
    cook_clock: dict[str, int] = field(default_factory=dict)

    def copy(self) -> "WorldState":
        return WorldState(
            family=self.family,
            rooms=self.rooms,
            containers={c: dict(v) for c, v in self.containers.items()},
            surfaces=self.surfaces,
            objects={o: ObjectState(s.oid, s.category, s.location, s.status,
                                    s.temperature)
                     for o, s in self.objects.items()},
            agents={a: AgentState(s.room, s.held) for a, s in self.agents.items()},
            clock=self.clock,
            cook_clock=dict(self.cook_clock),
        )

    def contents(self, location: str) -> list[str]:
        return sorted(o for o, s in self.objects.items() if s.location == location)

    def location_room(self, location: str) -> str:
        if location in self.containers:
            return self.containers[location]["room"]
        if location in self.surfaces:
            return self.surfaces[location]["room"]
        if location in self.agents:
            return self.agents[location].room
        raise KeyError(location)

    def serving_surfaces(self, room: str | None = None) -> list[str]:
        return sorted(s for s, v in self.surfaces.items()
                      if v.get("serving") and (room is None or v["room"] == room))

    def key(self) -> tuple:
        """Canonical hashable encoding of the dynamic state."""
        return (
            self.clock,
            tuple(sorted((c, v["open"]) for c, v in self.containers.items())),
            tuple(sorted((o, s.location, s.status, s.temperature)
                         for o, s in self.objects.items())),
            tuple(sorted((a, s.room, s.held) for a, s in self.agents.items())),
        )

    def digest(self) -> str:
        return hashlib.sha256(repr(self.key()).encode()).hexdigest()[:16]

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "rooms": {r: list(adj) for r, adj in self.rooms.items()},
            "containers": {c: dict(v) for c, v in self.containers.items()},
            "surfaces": {s: dict(v) for s, v in self.surfaces.items()},
            "objects": {o: {"category": s.category, "location": s.location,
                            "status": s.status, "temperature": s.temperature}
                        for o, s in self.objects.items()},
            "agents": {a: {"room": s.room, "held": s.held}
                       for a, s in self.agents.items()},
            "clock": self.clock,
            "cook_clock": dict(self.cook_clock),
        }

    @staticmethod
    def from_json(data: dict) -> "WorldState":
        return WorldState(
            family=data["family"],
            rooms={r: tuple(adj) for r, adj in data["rooms"].items()},
            containers={c: dict(v) for c, v in data["containers"].items()},
            surfaces={s: dict(v) for s, v in data["surfaces"].items()},
            objects={o: ObjectState(o, v["category"], v["location"],
                                    v["status"], v["temperature"])
                     for o, v in data["objects"].items()},
            agents={a: AgentState(v["room"], v["held"])
                    for a, v in data["agents"].items()},
            clock=data["clock"],
            cook_clock={o: int(t) for o, t in data.get("cook_clock", {}).items()},
        )


@dataclass(frozen=True)
class Predicate:
    """Household goal atom: `count` objects of `category` at one of `targets`."""
    category: str
    count: int
    targets: tuple[str, ...]
    relation: str = "on"  # "on" (surface) or "inside" (container)


@dataclass(frozen=True)
class Ingredient:
    """Kitchen goal atom: one object of `category` with `status`, served."""
    category: str
    status: str


@dataclass(frozen=True)
class Goal:
    family: str
    name: str
    predicates: tuple[Predicate, ...] = ()
    ingredients: tuple[Ingredient, ...] = ()

    def key(self) -> str:
        return self.name

    def to_json(self) -> dict:
        if self.family == HOUSEHOLD:
            return {"family": self.family, "name": self.name,
                    "predicates": [{"category": p.category, "count": p.count,
                                    "targets": list(p.targets),
                                    "relation": p.relation}
                                   for p in self.predicates]}
        return {"family": self.family, "name": self.name,
                "ingredients": [{"category": i.category, "status": i.status}
                                for i in self.ingredients]}

    @staticmethod
    def from_json(data: dict) -> "Goal":
        if data["family"] == HOUSEHOLD:
            preds = tuple(Predicate(p["category"], int(p["count"]),
                                    tuple(p["targets"]), p.get("relation", "on"))
                          for p in data["predicates"])
            return Goal(HOUSEHOLD, data["name"], predicates=preds)
        ings = tuple(Ingredient(i["category"], i["status"])
                     for i in data["ingredients"])
        return Goal(KITCHEN, data["name"], ingredients=ings)


@dataclass(frozen=True)
class Observation:
    agent: str
    room: str
    clock: int
    objects: dict[str, tuple[str, str]]      # oid -> (location, status)
    container_flags: dict[str, bool]         # same-room containers -> open?
    agents: dict[str, tuple[str, str | None]]  # visible agents -> (room, held)

    def visible_locations(self) -> set[str]:
        """Locations whose full contents this observation certifies."""
        locs = {c for c, is_open in self.container_flags.items() if is_open}
        locs |= set(self.agents)
        return locs


def load_scenario(config: dict) -> WorldState:
    """Build the initial WorldState from a scenario config dict.

    Raises ScenarioError on unknown rooms, duplicate object ids, or
    placements into nonexistent locations.
    """
    family = config.get("family")
    if family not in (KITCHEN, HOUSEHOLD):
        raise ScenarioError(f"unknown scenario family: {family!r}")

    rooms_cfg = config.get("rooms")
    if not rooms_cfg:
        raise ScenarioError("scenario has no rooms")
    rooms = {r: tuple(spec.get("adjacent", [])) for r, spec in rooms_cfg.items()}
    for r, adj in rooms.items():
        for other in adj:
            if other not in rooms:
                raise ScenarioError(f"room {r} adjacent to unknown room {other}")

    containers = {}
    for cid, spec in config.get("containers", {}).items():
        if spec["room"] not in rooms:
            raise ScenarioError(f"container {cid} placed in unknown room "
                                f"{spec['room']}")
        containers[cid] = {"room": spec["room"], "open": bool(spec.get("open", False))}

    surfaces = {}
    for sid, spec in config.get("surfaces", {}).items():
        if spec["room"] not in rooms:
            raise ScenarioError(f"surface {sid} placed in unknown room "
                                f"{spec['room']}")
        if sid in containers:
            raise ScenarioError(f"duplicate location id {sid}")
        surfaces[sid] = {"room": spec["room"], "serving": bool(spec.get("serving"))}

    agents = {}
    for aid, spec in config.get("agents", {}).items():
        if spec["room"] not in rooms:
            raise ScenarioError(f"agent {aid} starts in unknown room {spec['room']}")
        agents[aid] = AgentState(spec["room"], None)

    objects = {}
    for oid, spec in config.get("objects", {}).items():
        if oid in objects:
            raise ScenarioError(f"duplicate object id {oid}")
        loc = spec["location"]
        if loc not in containers and loc not in surfaces and loc not in agents:
            raise ScenarioError(f"object {oid} placed in nonexistent location {loc}")
        status = spec.get("status", RAW)
        if status not in STATUSES:
            raise ScenarioError(f"object {oid} has unknown status {status}")
        objects[oid] = ObjectState(
            oid, spec["category"], loc, status,
            int(spec.get("temperature", 0)))

    state = WorldState(family=family, rooms=rooms, containers=containers,
                       surfaces=surfaces, objects=objects, agents=agents)
    for aid, spec in config.get("agents", {}).items():
        held = spec.get("held")
        if held is not None:
            if held not in objects:
                raise ScenarioError(f"agent {aid} holds unknown object {held}")
            objects[held].location = aid
            state.agents[aid].held = held
    return state


def parse_goal(data: dict) -> Goal:
    return Goal.from_json(data)


def _reachable_rooms(state: WorldState, room: str) -> set[str]:
    if state.family == KITCHEN and len(state.agents) > 1:
        return {room}  # kitchen rooms are hard-partitioned in team episodes
    seen = {room}
    frontier = [room]
    while frontier:
        r = frontier.pop()
        for nxt in state.rooms[r]:
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


def legal_actions(state: WorldState, agent: str) -> set[Action]:
    """Every returned action succeeds when applied via step(); Wait always legal."""
    if agent not in state.agents:
        raise KeyError(f"unknown agent {agent!r}")
    me = state.agents[agent]
    room = me.room
    legal = {WAIT_ACTION}

    move_allowed = state.family == HOUSEHOLD or len(state.agents) == 1
    if move_allowed:
        for nxt in state.rooms[room]:
            legal.add(Action(MOVE, nxt))

    for cid, spec in state.containers.items():
        if spec["room"] != room:
            continue
        legal.add(Action(CLOSE if spec["open"] else OPEN, cid))

    if me.held is None:
        for oid, obj in state.objects.items():
            loc = obj.location
            if loc in state.surfaces and state.surfaces[loc]["room"] == room:
                legal.add(Action(GRAB, oid))
            elif (loc in state.containers and state.containers[loc]["room"] == room
                  and state.containers[loc]["open"]):
                legal.add(Action(GRAB, oid))
    else:
        held = state.objects[me.held]
        for cid, spec in state.containers.items():
            if spec["room"] == room and spec["open"]:
                legal.add(Action(PUT, me.held, cid))
        for sid, spec in state.surfaces.items():
            if spec["room"] == room and not spec.get("serving"):
                legal.add(Action(PUT, me.held, sid))
        if state.family == KITCHEN:
            if held.status == RAW:
                legal.add(Action(CHOP, me.held))
                legal.add(Action(COOK, me.held))
            if held.status != RAW and state.serving_surfaces(room):
                legal.add(Action(SERVE))
    return legal


def _apply(state: WorldState, agent: str, action: Action) -> None:
    me = state.agents[agent]
    if action.kind == WAIT:
        return
    if action.kind == MOVE:
        me.room = action.target
    elif action.kind == OPEN:
        state.containers[action.target]["open"] = True
    elif action.kind == CLOSE:
        state.containers[action.target]["open"] = False
    elif action.kind == GRAB:
        state.objects[action.target].location = agent
        me.held = action.target
    elif action.kind == PUT:
        state.objects[action.target].location = action.dest
        me.held = None
    elif action.kind == CHOP:
        state.objects[action.target].status = CHOPPED
    elif action.kind == COOK:
        obj = state.objects[action.target]
        obj.status = COOKED
        obj.temperature = INITIAL_TEMPERATURE
        state.cook_clock[action.target] = state.clock + 1
    elif action.kind == SERVE:
        counter = state.serving_surfaces(me.room)[0]
        state.objects[me.held].location = counter
        me.held = None
    else:
        raise IllegalActionError(f"unknown action kind {action.kind!r}")


def step(state: WorldState,
         actions: dict[str, Action]) -> tuple[WorldState, dict[str, Observation]]:
    """Simultaneous-move transition.

    Grab conflicts resolve in favor of the lexicographically smaller agent id;
    the loser's action becomes Wait.  Cooked items cool by 1 per step.
    """
    for aid, action in actions.items():
        if action not in legal_actions(state, aid):
            raise IllegalActionError(f"agent {aid} cannot take {action}")

    resolved = dict(actions)
    grabbing = sorted((a, act) for a, act in resolved.items() if act.kind == GRAB)
    taken: dict[str, str] = {}
    for aid, act in grabbing:
        if act.target in taken:
            resolved[aid] = WAIT_ACTION
        else:
            taken[act.target] = aid

    nxt = state.copy()
    for aid in sorted(resolved):
        _apply(nxt, aid, resolved[aid])
    nxt.clock += 1
    for obj in nxt.objects.values():
        if obj.status == COOKED and obj.temperature > 0:
            obj.temperature -= 1
    return nxt, {aid: observe(nxt, aid) for aid in nxt.agents}


def observe(state: WorldState, agent: str) -> Observation:
    """Room-local view: everything in the agent's room except closed containers."""
    me = state.agents[agent]
    room = me.room
    flags = {c: spec["open"] for c, spec in state.containers.items()
             if spec["room"] == room}
    visible_agents = {a: (s.room, s.held) for a, s in state.agents.items()
                      if s.room == room}
    objects = {}
    for oid, obj in state.objects.items():
        loc = obj.location
        if loc in state.containers:
            spec = state.containers[loc]
            if spec["room"] == room and spec["open"]:
                objects[oid] = (loc, obj.status)
        elif loc in state.surfaces:
            if state.surfaces[loc]["room"] == room:
                objects[oid] = (loc, obj.status)
        elif loc in state.agents:
            if state.agents[loc].room == room:
                objects[oid] = (loc, obj.status)
    return Observation(agent=agent, room=room, clock=state.clock,
                       objects=objects, container_flags=flags,
                       agents=visible_agents)


def goal_satisfied(state: WorldState, goal: Goal) -> bool:
    if goal.family == HOUSEHOLD:
        for pred in goal.predicates:
            have = sum(1 for obj in state.objects.values()
                       if obj.category == pred.category
                       and obj.location in pred.targets)
            if have < pred.count:
                return False
        return True
    serving = set(state.serving_surfaces())
    for ing in goal.ingredients:
        done = any(obj.category == ing.category and obj.status == ing.status
                   and obj.location in serving
                   for obj in state.objects.values())
        if not done:
            return False
    return True


def action_universe(state: WorldState, agent: str) -> tuple[Action, ...]:
    """Every syntactically possible action for the agent in this scenario.

    Policies are defined over this fixed support so distributions from
    different beliefs stay comparable.
    """
    acts = {WAIT_ACTION}
    if state.family == HOUSEHOLD or len(state.agents) == 1:
        for r in state.rooms:
            acts.add(Action(MOVE, r))
    for cid in state.containers:
        acts.add(Action(OPEN, cid))
        acts.add(Action(CLOSE, cid))
    put_targets = list(state.containers) + [
        s for s, spec in state.surfaces.items() if not spec.get("serving")]
    for oid in state.objects:
        acts.add(Action(GRAB, oid))
        for tgt in put_targets:
            acts.add(Action(PUT, oid, tgt))
        if state.family == KITCHEN:
            acts.add(Action(CHOP, oid))
            acts.add(Action(COOK, oid))
    if state.family == KITCHEN:
        acts.add(Action(SERVE))
    return tuple(sorted(acts, key=Action.encode))


def room_distance(state: WorldState, src: str, dst: str) -> int:
    """Shortest room-graph hop count; large if unreachable."""
    if src == dst:
        return 0
    dist = {src: 0}
    frontier = [src]
    while frontier:
        nxt_frontier = []
        for r in frontier:
            for n in state.rooms[r]:
                if n not in dist:
                    dist[n] = dist[r] + 1
                    if n == dst:
                        return dist[n]
                    nxt_frontier.append(n)
        frontier = nxt_frontier
    return 10 ** 6


def scenario_digest(config: dict) -> str:
    return hashlib.sha256(
        json.dumps(config, sort_keys=True).encode()).hexdigest()[:16]
