"""Structured utterances, deterministic text templates, and the chat grammar.

Messages carry sub-state distributions so belief updates are exact; the text
renderings exist for logs and the live interface.  The grammar parses the
template forms back into structured utterances (round-trip for point-mass
shares and requests).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .belief import Frame
from .world import RAW

SHARE = "share"
REQUEST = "request"
GOAL_HINT = "goal_hint"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class Utterance:
    kind: str
    substate: str | None = None
    content: tuple[tuple, ...] = ()        # ((value, prob), ...) for shares
    categories: tuple[str, ...] = ()       # goal hints
    counts: tuple[int, ...] = ()

    def content_dist(self) -> dict:
        return {v: p for v, p in self.content}

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "substate": self.substate,
            "content": [[list(v) if isinstance(v, tuple) else v, p]
                        for v, p in self.content],
            "categories": list(self.categories),
            "counts": list(self.counts),
            "text": render_utterance(self),
        }

    @staticmethod
    def from_json(data: dict) -> "Utterance":
        content = tuple(
            (tuple(v) if isinstance(v, list) else v, p)
            for v, p in data.get("content", []))
        return Utterance(kind=data["kind"], substate=data.get("substate"),
                         content=content,
                         categories=tuple(data.get("categories", [])),
                         counts=tuple(data.get("counts", [])))


def make_share(substate: str, dist: dict) -> Utterance:
    content = tuple(sorted(((v, p) for v, p in dist.items()), key=lambda t: repr(t[0])))
    return Utterance(SHARE, substate=substate, content=content)


def make_request(substate: str) -> Utterance:
    return Utterance(REQUEST, substate=substate)


def make_goal_hint(categories: list[str], counts: list[int]) -> Utterance:
    return Utterance(GOAL_HINT, categories=tuple(categories),
                     counts=tuple(counts))


UNKNOWN_REPLY = Utterance(UNKNOWN)


_CONTAINER_PREFIXES = ("fridge", "cabinet", "drawer", "dishwasher", "pantry")


def _preposition(location: str, frame: Frame | None) -> str:
    if frame is not None:
        return "in" if location in frame.container_rooms else "on"
    return "in" if location.split(".")[0] in _CONTAINER_PREFIXES else "on"


def render_utterance(u: Utterance, frame: Frame | None = None) -> str:
    """Deterministic template fill for an utterance."""
    if u.kind == REQUEST:
        return f"Do you know where {u.substate} is?"
    if u.kind == GOAL_HINT:
        parts = []
        for cat, n in zip(u.categories, u.counts):
            parts.append(f"{n} {cat}" if n else cat)
        return "I need " + " and ".join(parts) + "."
    if u.kind == UNKNOWN:
        return "I don't know."
    if u.kind == SHARE:
        dist = u.content_dist()
        top = max(dist.items(), key=lambda kv: (kv[1], repr(kv[0])))
        value = top[0]
        if isinstance(value, tuple):  # object sub-state: (location, status)
            loc, status = value
            prep = _preposition(loc, frame)
            if top[1] >= 1.0 - 1e-12:
                if status != RAW:
                    return (f"I found {u.substate} {prep} {loc} and it is "
                            f"{status}.")
                return f"I found {u.substate} {prep} {loc}."
            locs = sorted({v[0] for v, p in dist.items() if p > 0})
            return f"I think {u.substate} is in one of: {', '.join(locs)}."
        # container flag sub-state
        if top[1] >= 1.0 - 1e-12:
            return f"The {u.substate} is {value}."
        return f"I am not sure whether {u.substate} is open."
    raise ValueError(f"cannot render utterance kind {u.kind!r}")


_FOUND_RE = re.compile(
    r"^I found (?P<obj>[\w.]+) (?:in|on) (?P<loc>[\w.]+?)"
    r"(?: and it is (?P<status>chopped|cooked))?\.?$", re.IGNORECASE)
_IS_IN_RE = re.compile(
    r"^(?:the )?(?P<obj>[\w.]+) is (?:in|on) (?:the )?(?P<loc>[\w.]+?)\.?$",
    re.IGNORECASE)
_STATUS_RE = re.compile(
    r"^(?:the )?(?P<obj>[\w.]+) is (?P<status>raw|chopped|cooked)\.?$",
    re.IGNORECASE)
_WHERE_RE = re.compile(
    r"^(?:do you know )?where (?:is )?(?P<obj>[\w.]+?)(?: is)?\??$",
    re.IGNORECASE)
_NEED_RE = re.compile(r"^(?:i need|help me find|please find)\s+(?P<items>.+?)\.?$",
                      re.IGNORECASE)
_UNKNOWN_RE = re.compile(r"^i don'?t know\.?$", re.IGNORECASE)


def parse_chat(text: str, frame: Frame) -> Utterance | None:
    """Parse template-shaped chat into a structured utterance; None if the
    text falls outside the grammar."""
    text = text.strip()
    m = _FOUND_RE.match(text) or _IS_IN_RE.match(text)
    if m:
        obj, loc = m.group("obj"), m.group("loc")
        status = (m.groupdict().get("status") or RAW).lower()
        if obj in frame.object_ids and loc in frame.locations():
            return make_share(obj, {(loc, status): 1.0})
        return None
    m = _STATUS_RE.match(text)
    if m and m.group("obj") in frame.object_ids:
        obj, status = m.group("obj"), m.group("status").lower()
        locs = frame.locations()
        dist = {(loc, status): 1.0 / len(locs) for loc in locs}
        return make_share(obj, dist)
    m = _WHERE_RE.match(text)
    if m:
        obj = m.group("obj")
        if obj in frame.object_ids or obj in frame.container_rooms:
            return make_request(obj)
        return None
    m = _NEED_RE.match(text)
    if m:
        cats, counts = [], []
        for chunk in re.split(r",| and ", m.group("items")):
            chunk = chunk.strip()
            if not chunk:
                continue
            cm = re.match(r"^(?:(\d+)\s+)?([\w]+?)(s)?$", chunk)
            if not cm:
                continue
            count = int(cm.group(1)) if cm.group(1) else 0
            word = cm.group(2)
            cats.append(word if _known_category(word, frame)
                        else word + (cm.group(3) or ""))
            counts.append(count)
        cats = [c for c in cats]
        if cats:
            return make_goal_hint(cats, counts)
        return None
    if _UNKNOWN_RE.match(text):
        return UNKNOWN_REPLY
    return None


def _known_category(word: str, frame: Frame) -> bool:
    return word in set(frame.categories.values())
