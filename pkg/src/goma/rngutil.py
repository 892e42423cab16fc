"""Stable, platform-independent seeding for every stochastic site."""
from __future__ import annotations

import hashlib
import random


def stable_seed(*parts) -> int:
    text = ":".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


def stable_rng(*parts) -> random.Random:
    return random.Random(stable_seed(*parts))
