"""Determinized best-first planning with a softmax action distribution.

plan() samples K full states from a level-0 belief, computes optimal
cost-to-go for each root action with A* in each sample, and returns a
softmax over the averaged root values, epsilon-smoothed over the scenario's
full action universe so any two policies share a support.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field, replace

from . import world as W
from .belief import Belief0, OPEN_V
from .rngutil import stable_rng

UNREACHABLE = 10 ** 6


@dataclass(frozen=True)
class PlannerConfig:
    budget: int = 5000          # node expansions per search
    horizon: int = 40
    tau: float = 1.0
    discount: float = 1.0
    samples: int = 10           # determinizations per plan() call
    seed: int = 0
    epsilon: float = 1e-6       # per-action smoothing floor

    def __post_init__(self):
        if self.budget <= 0 or self.horizon < 1 or self.tau <= 0:
            raise ValueError("invalid planner config")


@dataclass
class Policy:
    probs: dict[W.Action, float]
    tau: float
    expected_cost: float
    exploratory: bool = False

    def __getitem__(self, action: W.Action) -> float:
        return self.probs[action]

    def argmax(self, allowed=None) -> W.Action:
        pool = self.probs if allowed is None else {
            a: p for a, p in self.probs.items() if a in allowed}
        best = max(pool.values())
        return min((a for a, p in pool.items() if p == best),
                   key=W.Action.encode)


def determinize(b: Belief0, template: W.WorldState, rng,
                other_rooms: dict[str, str] | None = None) -> W.WorldState:
    """Sample a full world state from a belief.

    Agent poses come from the belief owner's known pose plus assumed rooms for
    the others.  Hand conflicts (two objects sampled into one hand) resolve
    deterministically by relocating extras to a surface in that agent's room.
    """
    state = template.copy()
    state.clock = 0
    me = b.owner
    state.agents[me].room = b.own_room
    if other_rooms:
        for aid, room in other_rooms.items():
            if aid in state.agents:
                state.agents[aid].room = room
    for aid in state.agents:
        state.agents[aid].held = None

    for cid in sorted(b.frame.container_rooms):
        vals, probs = zip(*sorted(b.dist[cid].items()))
        choice = rng.choices(vals, probs)[0]
        state.containers[cid]["open"] = choice == OPEN_V

    hands: dict[str, str] = {}
    if b.own_held is not None:
        hands[me] = b.own_held
    for oid in b.frame.object_ids:
        if b.own_held == oid:
            loc, status = me, _sampled_status(b, oid, me, rng)
        else:
            items = sorted(b.dist[oid].items(), key=lambda kv: repr(kv[0]))
            vals = [v for v, _ in items]
            probs = [p for _, p in items]
            loc, status = rng.choices(vals, probs)[0]
            if loc in state.agents:
                if hands.get(loc) not in (None, oid):
                    loc = _fallback_location(state, state.agents[loc].room)
                else:
                    hands[loc] = oid
        obj = state.objects[oid]
        obj.location = loc
        obj.status = status
        obj.temperature = 0
    for aid, oid in hands.items():
        state.agents[aid].held = oid
    return state


def _sampled_status(b: Belief0, oid: str, loc: str, rng) -> str:
    sub = {v: p for v, p in b.dist[oid].items() if v[0] == loc}
    if not sub:
        return W.RAW
    items = sorted(sub.items(), key=lambda kv: repr(kv[0]))
    return rng.choices([v for v, _ in items], [p for _, p in items])[0][1]


def _fallback_location(state: W.WorldState, room: str) -> str:
    for sid in sorted(state.surfaces):
        if state.surfaces[sid]["room"] == room and not state.surfaces[sid].get("serving"):
            return sid
    for sid in sorted(state.surfaces):
        if state.surfaces[sid]["room"] == room:
            return sid
    for cid in sorted(state.containers):
        if state.containers[cid]["room"] == room:
            return cid
    return sorted(state.surfaces)[0]


# ---------------------------------------------------------------------------
# goal tests with an achievability mask

def _achievable_predicate_counts(state: W.WorldState, agent: str,
                                 goal: W.Goal) -> dict[int, int]:
    """Per-predicate target counts capped by what this agent can reach."""
    counts = {}
    for i, pred in enumerate(goal.predicates):
        free = sum(1 for obj in state.objects.values()
                   if obj.category == pred.category
                   and not (obj.location in state.agents
                            and obj.location != agent))
        counts[i] = min(pred.count, free)
    return counts


def _achievable_ingredients(state: W.WorldState, agent: str,
                            goal: W.Goal) -> list[W.Ingredient]:
    reach = W._reachable_rooms(state, state.agents[agent].room)
    out = []
    for ing in goal.ingredients:
        for obj in state.objects.values():
            if obj.category != ing.category:
                continue
            loc = obj.location
            if loc in state.agents and loc != agent:
                continue
            room = state.location_room(loc)
            if room in reach and (obj.status == W.RAW or obj.status == ing.status):
                out.append(ing)
                break
    return out


def make_goal_test(root: W.WorldState, agent: str, goal: W.Goal):
    """Goal test restricted to the part of the goal this agent can achieve
    in the given determinized world."""
    if goal.family == W.HOUSEHOLD:
        caps = _achievable_predicate_counts(root, agent, goal)

        def test(state: W.WorldState) -> bool:
            for i, pred in enumerate(goal.predicates):
                have = sum(1 for obj in state.objects.values()
                           if obj.category == pred.category
                           and obj.location in pred.targets)
                if have < caps[i]:
                    return False
            return True
        return test

    todo = _achievable_ingredients(root, agent, goal)
    serving = set(root.serving_surfaces())

    def test(state: W.WorldState) -> bool:
        for ing in todo:
            done = any(obj.category == ing.category and obj.status == ing.status
                       and obj.location in serving
                       for obj in state.objects.values())
            if not done:
                return False
        return True
    return test


def _heuristic(state: W.WorldState, agent: str, goal: W.Goal,
               caps: dict[int, int] | None,
               todo: list[W.Ingredient] | None) -> int:
    """Admissible remaining-action count: each item still needs at least its
    missing grab/put/prepare/serve steps, plus the longest single travel leg."""
    me = state.agents[agent]
    h = 0
    max_leg = 0
    if goal.family == W.HOUSEHOLD:
        for i, pred in enumerate(goal.predicates):
            have = [o for o in state.objects.values()
                    if o.category == pred.category and o.location in pred.targets]
            missing = caps[i] - len(have)
            if missing <= 0:
                continue
            candidates = sorted(
                (o for o in state.objects.values()
                 if o.category == pred.category and o.location not in pred.targets
                 and not (o.location in state.agents and o.location != agent)),
                key=lambda o: (o.location != agent, o.oid))
            for obj in candidates[:missing]:
                h += 1 if obj.location == agent else 2  # grab + put
                src = state.location_room(obj.location)
                dst = min(W.room_distance(state, src, state.location_room(t))
                          for t in pred.targets)
                leg = W.room_distance(state, me.room, src) + dst
                max_leg = max(max_leg, leg)
        return h + max_leg

    serving = set(state.serving_surfaces())
    forced_closed: set[str] = set()
    for ing in todo:
        best = None
        candidates = 0
        only_container = None
        for obj in sorted(state.objects.values(), key=lambda o: o.oid):
            if obj.category != ing.category:
                continue
            if obj.status == ing.status and obj.location in serving:
                best = 0
                candidates = 0
                break
            need = 0
            if obj.location != agent:
                need += 1  # grab
            if obj.status != ing.status:
                if obj.status != W.RAW:
                    continue  # monotone statuses: cannot fix
                need += 1  # chop or cook
            need += 1  # serve
            candidates += 1
            if (obj.location in state.containers
                    and not state.containers[obj.location]["open"]):
                only_container = obj.location
            if best is None or need < best:
                best = need
        if best:
            h += best
            # with a single candidate its container is forced, so one open
            # per such container is an admissible addition
            if candidates == 1 and only_container:
                forced_closed.add(only_container)
    h += len(forced_closed)
    return h


def _needed_objects(state: W.WorldState, agent: str, goal: W.Goal,
                    caps: dict[int, int] | None,
                    todo: list[W.Ingredient] | None) -> dict[str, str]:
    """Objects that can still contribute to the masked goal, with the status
    each one must end up in."""
    needed: dict[str, str] = {}
    if goal.family == W.HOUSEHOLD:
        for i, pred in enumerate(goal.predicates):
            have = sum(1 for o in state.objects.values()
                       if o.category == pred.category
                       and o.location in pred.targets)
            if have >= caps[i]:
                continue
            for o in state.objects.values():
                if (o.category == pred.category
                        and o.location not in pred.targets
                        and not (o.location in state.agents
                                 and o.location != agent)):
                    needed[o.oid] = o.status
        return needed
    serving = set(state.serving_surfaces())
    for ing in todo:
        if any(o.category == ing.category and o.status == ing.status
               and o.location in serving for o in state.objects.values()):
            continue
        for o in state.objects.values():
            if (o.category == ing.category
                    and (o.status == W.RAW or o.status == ing.status)
                    and not (o.location in state.agents
                             and o.location != agent)):
                needed[o.oid] = ing.status
    return needed


def _goal_targets(state: W.WorldState, goal: W.Goal) -> set[str]:
    if goal.family == W.HOUSEHOLD:
        return {t for pred in goal.predicates for t in pred.targets}
    return set(state.serving_surfaces())


def _solo_successors(state: W.WorldState, agent: str, goal: W.Goal = None,
                     caps=None, todo=None):
    """Goal-directed successors.

    Prunings preserve at least one optimal plan in a solo deterministic
    world: closing never helps, grabbing or transforming an object the
    masked goal cannot use never helps, and every put that merely frees the
    hand is interchangeable with the canonical one.
    """
    if goal is None:
        for action in sorted(W.legal_actions(state, agent),
                             key=W.Action.encode):
            if action.kind == W.WAIT:
                continue
            nxt = state.copy()
            W._apply(nxt, agent, action)
            nxt.clock += 1
            yield action, nxt
        return

    needed = _needed_objects(state, agent, goal, caps, todo)
    targets = _goal_targets(state, goal)
    me = state.agents[agent]
    dump = _fallback_location(state, me.room)
    for action in sorted(W.legal_actions(state, agent), key=W.Action.encode):
        k = action.kind
        if k in (W.WAIT, W.CLOSE):
            continue
        if k == W.OPEN:
            holds_needed = any(state.objects[o].location == action.target
                               for o in needed)
            if not holds_needed and action.target not in targets:
                continue
        elif k == W.GRAB:
            if action.target not in needed:
                continue
        elif k == W.PUT:
            if action.target in needed:
                if goal.family == W.HOUSEHOLD:
                    if action.dest not in targets:
                        continue
                else:
                    continue  # kitchen items finish via serve, never put
            elif action.dest != dump:
                continue
        elif k in (W.CHOP, W.COOK):
            want = needed.get(action.target)
            if want != (W.CHOPPED if k == W.CHOP else W.COOKED):
                continue
        nxt = state.copy()
        W._apply(nxt, agent, action)
        nxt.clock += 1
        yield action, nxt


def _state_key(state: W.WorldState, agent: str) -> tuple:
    return (
        state.agents[agent].room,
        state.agents[agent].held,
        tuple(sorted((c, v["open"]) for c, v in state.containers.items())),
        tuple(sorted((o, s.location, s.status)
                     for o, s in state.objects.items())),
    )


def astar_cost(start: W.WorldState, agent: str, goal: W.Goal, goal_test,
               cfg: PlannerConfig, cache: dict | None = None) -> int | None:
    """Optimal plan length from start to the (masked) goal, or None.

    Deterministic: ties broken by insertion order over lexicographically
    sorted successors.
    """
    if goal.family == W.HOUSEHOLD:
        caps = _achievable_predicate_counts(start, agent, goal)
        todo = None
    else:
        caps = None
        todo = _achievable_ingredients(start, agent, goal)

    key0 = _state_key(start, agent)
    if cache is not None and key0 in cache:
        return cache[key0]
    if goal_test(start):
        if cache is not None:
            cache[key0] = 0
        return 0

    seq = 0
    h0 = _heuristic(start, agent, goal, caps, todo)
    open_heap = [(h0, h0, -1, 0, start)]
    best_g = {key0: 0}
    expansions = 0
    while open_heap and expansions < cfg.budget:
        _, _, _, g, state = heapq.heappop(open_heap)
        key = _state_key(state, agent)
        if g > best_g.get(key, g):
            continue  # stale heap entry
        if goal_test(state):
            if cache is not None:
                cache[key0] = g
            return g
        expansions += 1
        for _, child in _solo_successors(state, agent, goal, caps, todo):
            ck = _state_key(child, agent)
            cg = g + 1
            if cg > cfg.horizon:
                continue
            if ck in best_g and best_g[ck] <= cg:
                continue
            best_g[ck] = cg
            ch = _heuristic(child, agent, goal, caps, todo)
            seq += 1
            heapq.heappush(open_heap, (cg + ch, ch, seq, cg, child))
    if cache is not None:
        cache[key0] = None
    return None


def _exploration_fallback(state: W.WorldState, agent: str) -> W.Action:
    legal = sorted(W.legal_actions(state, agent), key=W.Action.encode)
    for a in legal:
        if a.kind == W.OPEN:
            return a
    for a in legal:
        if a.kind == W.MOVE:
            return a
    return W.WAIT_ACTION


_plan_cache: dict[tuple, Policy] = {}


def clear_plan_cache() -> None:
    _plan_cache.clear()


def plan(b: Belief0, goal: W.Goal, agent: str, template: W.WorldState,
         cfg: PlannerConfig, universe: tuple[W.Action, ...] | None = None,
         other_rooms: dict[str, str] | None = None) -> Policy:
    """Softmax policy over root actions from determinized best-first search.

    Deterministic given (belief, goal, agent, cfg): the determinization RNG
    is seeded from the belief digest.
    """
    universe = universe or W.action_universe(template, agent)
    cache_key = (b.digest(), goal.key(), agent, cfg,
                 tuple(sorted(other_rooms.items())) if other_rooms else None,
                 len(universe))
    hit = _plan_cache.get(cache_key)
    if hit is not None:
        return hit

    rng = stable_rng("determinize", cfg.seed, b.dist_digest(), goal.key(),
                     agent)
    samples: dict[tuple, tuple[W.WorldState, int]] = {}
    for _ in range(cfg.samples):
        s = determinize(b, template, rng, other_rooms)
        k = _state_key(s, agent)
        if k in samples:
            samples[k] = (samples[k][0], samples[k][1] + 1)
        else:
            samples[k] = (s, 1)

    action_costs: dict[W.Action, list[tuple[int, float]]] = {}
    any_reached = False
    all_satisfied = True
    search_cache: dict[tuple, int | None] = {}
    for sample, weight in samples.values():
        goal_test = make_goal_test(sample, agent, goal)
        legal = sorted(W.legal_actions(sample, agent), key=W.Action.encode)
        satisfied = goal_test(sample)
        all_satisfied = all_satisfied and satisfied
        for action in legal:
            if satisfied and action.kind == W.WAIT:
                cost = 0.0
                any_reached = True
            else:
                child = sample.copy()
                W._apply(child, agent, action)
                child.clock += 1
                ctg = astar_cost(child, agent, goal, goal_test, cfg,
                                 cache=search_cache)
                if ctg is None:
                    cost = float(cfg.horizon)
                else:
                    cost = 1.0 + ctg
                    any_reached = True
            action_costs.setdefault(action, []).append((weight, cost))

    if not any_reached:
        fallback_state = next(iter(samples.values()))[0]
        fallback = _exploration_fallback(fallback_state, agent)
        q = {fallback: 0.0}
        policy = _softmax_policy(q, universe, cfg, float(cfg.horizon),
                                 exploratory=True)
        _plan_cache[cache_key] = policy
        return policy

    total_w = sum(w for _, w in samples.values())
    q_values = {}
    for action, pairs in action_costs.items():
        seen_w = sum(w for w, _ in pairs)
        avg = (sum(w * c for w, c in pairs)
               + (total_w - seen_w) * float(cfg.horizon)) / total_w
        q_values[action] = -avg

    expected = 0.0 if all_satisfied else None
    policy = _softmax_policy(q_values, universe, cfg, expected_cost=expected)
    _plan_cache[cache_key] = policy
    return policy


def _softmax_policy(q_values: dict[W.Action, float],
                    universe: tuple[W.Action, ...], cfg: PlannerConfig,
                    default_cost: float | None = None,
                    expected_cost: float | None = None,
                    exploratory: bool = False) -> Policy:
    qmax = max(q_values.values())
    weights = {a: math.exp((q_values[a] - qmax) / cfg.tau) for a in q_values}
    total = sum(weights.values())
    eps = cfg.epsilon
    n = len(universe)
    probs = {}
    for a in universe:
        raw = weights.get(a, 0.0) / total
        probs[a] = raw * (1.0 - eps * n) + eps
    if expected_cost is None:
        expected_cost = sum(
            probs[a] * (-q_values.get(a, -(default_cost or cfg.horizon)))
            for a in universe)
    return Policy(probs=probs, tau=cfg.tau, expected_cost=expected_cost,
                  exploratory=exploratory)


def action_likelihood(action: W.Action, b: Belief0, goal: W.Goal, agent: str,
                      template: W.WorldState, cfg: PlannerConfig,
                      universe: tuple[W.Action, ...] | None = None,
                      other_rooms: dict[str, str] | None = None) -> float:
    """Inverse-planning likelihood P(action | belief, goal)."""
    policy = plan(b, goal, agent, template, cfg, universe, other_rooms)
    return policy.probs.get(action, cfg.epsilon)
