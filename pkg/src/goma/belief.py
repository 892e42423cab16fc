"""Level-0 beliefs: per-sub-state categorical distributions.

One sub-state per object (joint location x status value) plus one per
container open/closed flag.  All operations are functional: they return new
Belief0 values and never mutate their inputs.
"""
from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass

from .world import (HOUSEHOLD, RAW, STATUSES, Observation, WorldState)

log = logging.getLogger(__name__)

NORM_TOL = 1e-9
DEFAULT_H_MAX = 0.5  # nats

OPEN_V = "open"
CLOSED_V = "closed"


@dataclass(frozen=True)
class Frame:
    """Static scenario structure shared by all beliefs over it."""
    family: str
    rooms: tuple[str, ...]
    container_rooms: dict[str, str]
    surface_rooms: dict[str, str]
    serving_surfaces: tuple[str, ...]
    agent_ids: tuple[str, ...]
    object_ids: tuple[str, ...]
    categories: dict[str, str]

    @staticmethod
    def of(state: WorldState) -> "Frame":
        return Frame(
            family=state.family,
            rooms=tuple(sorted(state.rooms)),
            container_rooms={c: v["room"] for c, v in state.containers.items()},
            surface_rooms={s: v["room"] for s, v in state.surfaces.items()},
            serving_surfaces=tuple(state.serving_surfaces()),
            agent_ids=tuple(sorted(state.agents)),
            object_ids=tuple(sorted(state.objects)),
            categories={o: s.category for o, s in state.objects.items()},
        )

    def locations(self) -> tuple[str, ...]:
        return tuple(sorted(self.container_rooms)
                     + sorted(self.surface_rooms)
                     + list(self.agent_ids))

    def statuses(self) -> tuple[str, ...]:
        return (RAW,) if self.family == HOUSEHOLD else STATUSES

    def substate_ids(self) -> tuple[str, ...]:
        return tuple(list(self.object_ids) + sorted(self.container_rooms))

    def domain(self, sid: str) -> tuple:
        if sid in self.container_rooms:
            return (OPEN_V, CLOSED_V)
        if sid in self.object_ids:
            return tuple((loc, st) for loc in self.locations()
                         for st in self.statuses())
        raise KeyError(f"unknown sub-state id {sid!r}")

    def location_room(self, loc: str) -> str | None:
        if loc in self.container_rooms:
            return self.container_rooms[loc]
        if loc in self.surface_rooms:
            return self.surface_rooms[loc]
        return None  # agent hands move around


Dist = dict  # value -> probability


def entropy(dist: Dist) -> float:
    """Shannon entropy in nats."""
    return -sum(p * math.log(p) for p in dist.values() if p > 0.0)


def _normalize(dist: Dist) -> Dist:
    total = sum(dist.values())
    if total <= 0.0:
        raise ZeroDivisionError("cannot normalize an all-zero distribution")
    return {v: p / total for v, p in dist.items() if p > 0.0}


def _point(domain, value) -> Dist:
    if value not in domain:
        raise ValueError(f"value {value!r} outside domain")
    return {value: 1.0}


class Belief0:
    """An agent's belief about the physical state, plus its own pose."""

    __slots__ = ("owner", "frame", "dist", "own_room", "own_held")

    def __init__(self, owner: str, frame: Frame, dist: dict[str, Dist],
                 own_room: str, own_held: str | None = None):
        self.owner = owner
        self.frame = frame
        self.dist = dist
        self.own_room = own_room
        self.own_held = own_held

    def copy(self) -> "Belief0":
        return Belief0(self.owner, self.frame,
                       {sid: dict(d) for sid, d in self.dist.items()},
                       self.own_room, self.own_held)

    def digest(self) -> str:
        parts = [self.owner, self.own_room, str(self.own_held),
                 self.dist_digest()]
        return hashlib.sha256("|".join(parts).encode()).hexdigest()[:16]

    def dist_digest(self) -> str:
        """Digest over the sub-state distributions only.

        Stable across the owner's own movement, so determinized samples do
        not churn when no new information has arrived.
        """
        parts = []
        for sid in sorted(self.dist):
            for v in sorted(self.dist[sid], key=repr):
                parts.append(f"{sid}={v!r}:{self.dist[sid][v]:.12g}")
        return hashlib.sha256("|".join(parts).encode()).hexdigest()[:16]

    def to_json(self) -> dict:
        def enc(sid, d):
            if sid in self.frame.container_rooms:
                return {v: p for v, p in d.items()}
            return {f"{loc}|{st}": p for (loc, st), p in d.items()}
        return {"owner": self.owner, "own_room": self.own_room,
                "own_held": self.own_held,
                "substates": {sid: enc(sid, d) for sid, d in self.dist.items()}}


def init_uniform(state: WorldState, agent: str,
                 frame: Frame | None = None) -> Belief0:
    """Initial belief: locations unknown, starting statuses common knowledge.

    Object mass is uniform over container and surface locations at the
    object's initial status; hands start empty so they carry no initial
    mass.  Starting statuses and container flags are common knowledge.
    The full (location, status) domain stays available for later
    observation and message updates.
    """
    frame = frame or Frame.of(state)
    placeable = tuple(sorted(frame.container_rooms)
                      + sorted(frame.surface_rooms))
    dist = {}
    for sid in frame.substate_ids():
        dom = frame.domain(sid)
        if sid in frame.container_rooms:
            flag = OPEN_V if state.containers[sid]["open"] else CLOSED_V
            dist[sid] = _point(dom, flag)
        else:
            st0 = state.objects[sid].status
            p = 1.0 / len(placeable)
            dist[sid] = {(loc, st0): p for loc in placeable}
    me = state.agents[agent]
    return Belief0(agent, frame, dist, me.room, me.held)


def seed_knowledge(b: Belief0, state: WorldState,
                   sids: list[str]) -> Belief0:
    """Point-mass the named sub-states at their true values (scenario 'known')."""
    out = b.copy()
    for sid in sids:
        if sid in state.containers:
            val = OPEN_V if state.containers[sid]["open"] else CLOSED_V
        elif sid in state.objects:
            obj = state.objects[sid]
            val = (obj.location, obj.status)
        else:
            raise KeyError(f"unknown sub-state id {sid!r}")
        out.dist[sid] = _point(b.frame.domain(sid), val)
    return out


def update_from_observation(b: Belief0, obs: Observation) -> Belief0:
    """Condition on a room-local observation.

    Observed sub-states become point masses.  An object absent from a fully
    visible location has that location zeroed and the rest renormalized.
    Contradictions (evidence at a zero-probability value) reset the sub-state
    rather than failing: direct observation trumps hearsay.
    """
    if obs.agent != b.owner:
        raise ValueError(f"observation for {obs.agent}, belief owned by {b.owner}")
    out = b.copy()
    out.own_room = obs.room
    out.own_held = obs.agents.get(b.owner, (obs.room, None))[1]

    for cid, is_open in obs.container_flags.items():
        out.dist[cid] = _point(b.frame.domain(cid), OPEN_V if is_open else CLOSED_V)

    visible = obs.visible_locations()
    visible |= {s for s, room in b.frame.surface_rooms.items() if room == obs.room}

    for oid in b.frame.object_ids:
        if oid in obs.objects:
            loc, status = obs.objects[oid]
            if out.dist[oid].get((loc, status), 0.0) == 0.0:
                log.info("contradiction: %s observed %s at %r with prior 0",
                         b.owner, oid, (loc, status))
            out.dist[oid] = _point(b.frame.domain(oid), (loc, status))
            continue
        pruned = {v: p for v, p in out.dist[oid].items() if v[0] not in visible}
        if not pruned:
            log.info("contradiction: %s ruled out all mass for %s; resetting",
                     b.owner, oid)
            dom = [v for v in b.frame.domain(oid) if v[0] not in visible]
            dom = dom or list(b.frame.domain(oid))
            out.dist[oid] = {v: 1.0 / len(dom) for v in dom}
        else:
            out.dist[oid] = _normalize(pruned)
    return out


def update_from_message(b: Belief0, content: tuple[str, Dist]) -> Belief0:
    """Replace one sub-state's distribution with a communicated one."""
    sid, dist = content
    if sid not in b.dist:
        raise KeyError(f"unknown sub-state id {sid!r}")
    dom = set(b.frame.domain(sid))
    if not set(dist) <= dom:
        raise ValueError(f"message content outside domain of {sid}")
    total = sum(dist.values())
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"message content not normalized (sum={total})")
    out = b.copy()
    out.dist[sid] = _normalize(dict(dist))
    return out


def merge(b: Belief0, content: tuple[str, Dist]) -> Belief0:
    """Belief merge: adopt another agent's distribution for one sub-state."""
    return update_from_message(b, content)


def knowledge(b: Belief0, h_max: float = DEFAULT_H_MAX) -> dict[str, Dist]:
    """Sub-states whose belief entropy is strictly below h_max, in nats."""
    if h_max < 0:
        raise ValueError("h_max must be >= 0")
    return {sid: dict(d) for sid, d in b.dist.items() if entropy(d) < h_max}


def check_normalized(b: Belief0, tol: float = NORM_TOL) -> bool:
    return all(abs(sum(d.values()) - 1.0) <= tol for d in b.dist.values())
