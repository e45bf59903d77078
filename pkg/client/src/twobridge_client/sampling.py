"""Uniform sampling over legal actions at whatever mask fidelity the
profile exposes.

Branch masks pin legality exactly, so sampled actions are never
rejected.  Verb-only masks leave unit selection unknown; selecting every
slot is always legal while the episode runs (dead slots degrade to
no-ops server-side).  Flat codes are validated per unit and in-range
codes are always accepted.
"""

from __future__ import annotations

import numpy as np

from .spec import ActionDesc
from .wire import VERBS, flat_action, structured_action


def _subset(legal: list[int], rng: np.random.Generator) -> list[int]:
    # nonempty random subset of the legal slots
    picked = [s for s in legal if rng.random() < 0.5]
    if not picked:
        picked = [legal[int(rng.integers(len(legal)))]]
    return picked


def random_legal_action(desc: ActionDesc, mask, rng: np.random.Generator):
    """One uniform-ish legal action for the given space and mask."""
    if desc.kind == "flat":
        return flat_action(rng.integers(desc.flat_codes, size=desc.units))

    if mask is not None and "who" in mask:  # branch-level: fully informed
        verbs = [v for v, ok in zip(VERBS, mask["verb"]) if ok]
        verb = verbs[int(rng.integers(len(verbs)))]
        if verb == "noop":
            return structured_action("noop", [])
        who = _subset([s for s, ok in enumerate(mask["who"]) if ok], rng)
        if verb == "move":
            dirs = [d for d, ok in enumerate(mask["direction"]) if ok]
            return structured_action("move", who, direction=dirs[int(rng.integers(len(dirs)))])
        targets = [t for t, ok in enumerate(mask["enemy"]) if ok]
        target = targets[int(rng.integers(len(targets)))]
        return structured_action(
            "attack", who, enemy=None if target == desc.enemy_slots else target
        )

    verb_mask = [True, True, True] if mask is None else mask["verb"]
    verbs = [v for v, ok in zip(VERBS, verb_mask) if ok]
    verb = verbs[int(rng.integers(len(verbs)))]
    if verb == "noop":
        return structured_action("noop", [])
    everyone = list(range(desc.units))
    if verb == "move":
        return structured_action("move", everyone, direction=int(rng.integers(desc.directions)))
    return structured_action("attack", everyone, enemy=int(rng.integers(desc.enemy_slots)))
