"""Action spaces, legality masks, and decoding into per-unit orders.

Two families:

* Structured: one (verb, who, direction, enemy) command broadcast to the
  selected friendly slots.  Verb-level masking checks only the verb;
  branch-level masking additionally checks who/direction/enemy.
* Flat: one integer code per friendly slot; 0 no-op, 1..8 compass moves,
  9..8+N_E attacks on enemy slots.  Never masked; impossible codes degrade.

Decoding fails fast: an action violating its mask raises instead of being
silently clamped, so trainers that rely on masks notice immediately.
"""

from __future__ import annotations

import enum
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from .engine import NOOP_ORDER, Order, OrderKind, WorldState, attack_order, move_order
from .errors import (
    InvalidActionError,
    InvalidSelectionError,
    InvalidTargetError,
    InvalidVerbError,
)

N_SLOTS = 5
N_DIRECTIONS = 8
FLAT_NOOP = 0


class Verb(enum.IntEnum):
    NOOP = 0
    MOVE = 1
    ATTACK = 2


class StructuredAction(NamedTuple):
    """Single broadcast command; `who` is a 5-bit mask over friendly slots.

    direction is used only by MOVE, enemy_idx only by ATTACK; a null
    enemy_idx under ATTACK means "hold" and decodes to no-ops.
    """

    verb: int
    who: int = 0
    direction: int | None = None
    enemy_idx: int | None = None


class ActionMask(NamedTuple):
    verb: np.ndarray  # bool (3,)
    who: np.ndarray  # bool (5,)
    direction: np.ndarray  # bool (8,)
    enemy: np.ndarray  # bool (n_enemy + 1,), last entry = null target


def who_bits(slots: Sequence[int]) -> int:
    """Selection mask from an iterable of slot indices."""
    m = 0
    for s in slots:
        m |= 1 << s
    return m


def who_slots(mask: int) -> list[int]:
    return [s for s in range(N_SLOTS) if mask >> s & 1]


def flat_action_count(n_enemy: int) -> int:
    """Number of flat codes per unit: no-op + 8 moves + one per enemy slot."""
    return 9 + n_enemy


def verb_mask(world: WorldState, alive_counts: tuple[int, int] | None = None) -> np.ndarray:
    """Verb-level legality: NoOp always; Move iff any friendly alive; Attack
    iff any enemy remains.  On a terminal world only NoOp stays legal.

    alive_counts = (friendly_alive, enemy_alive) skips the recount when the
    caller already holds fresh aggregates.
    """
    out = np.zeros(3, dtype=bool)
    out[Verb.NOOP] = True
    if world.outcome is None:
        fa, ea = alive_counts if alive_counts is not None else (
            world.friendly_alive,
            world.enemy_alive,
        )
        out[Verb.MOVE] = fa >= 1
        out[Verb.ATTACK] = ea >= 1
    return out


def _feasible_directions(world: WorldState) -> tuple[np.ndarray, int]:
    out = np.empty(N_DIRECTIONS, dtype=bool)
    n = _kernels.feasible_directions(
        world.grid.passable,
        world.pos,
        world.hp,
        world.n_friendly,
        world.params.move_speed,
        out,
    )
    return out, int(n)


def branch_mask(world: WorldState, alive_counts: tuple[int, int] | None = None) -> ActionMask:
    """Branch-level legality: who = alive friendly slots, direction = moves
    that change some alive unit's position, enemy = alive slots plus the
    always-legal null target.  Move is additionally masked off when no
    direction is feasible, so every legal verb has a legal completion."""
    vm = verb_mask(world, alive_counts)
    who = np.zeros(N_SLOTS, dtype=bool)
    who[: world.n_friendly] = world.hp[: world.n_friendly] > 0
    direction, n_dirs = _feasible_directions(world)
    if n_dirs == 0:
        vm[Verb.MOVE] = False
    enemy = np.empty(world.n_enemy + 1, dtype=bool)
    enemy[: world.n_enemy] = world.hp[world.n_friendly :] > 0
    enemy[world.n_enemy] = True
    return ActionMask(verb=vm, who=who, direction=direction, enemy=enemy)


def permissive_mask(world: WorldState) -> ActionMask:
    """Verb-level masking expressed as an ActionMask: branches wide open."""
    return ActionMask(
        verb=verb_mask(world),
        who=np.ones(N_SLOTS, dtype=bool),
        direction=np.ones(N_DIRECTIONS, dtype=bool),
        enemy=np.ones(world.n_enemy + 1, dtype=bool),
    )


def _decode_core(
    action: StructuredAction, mask: ActionMask, world: WorldState
) -> tuple[int, list[int], int]:
    """Validate a structured action and resolve it to (kind, effective, arg).

    kind is an OrderKind; effective lists the live selected slots it applies
    to (empty for a no-op result); arg is the direction for MOVE and the
    absolute target index for ATTACK.  Raises before anything is resolved,
    so callers may mutate state based on the result without cleanup paths.
    """
    verb = action.verb
    if not 0 <= verb < len(mask.verb):
        raise InvalidVerbError(f"verb {verb} outside the action space")
    if not mask.verb[verb]:
        raise InvalidVerbError(f"verb {Verb(verb).name} is masked")
    if verb == Verb.NOOP:
        return OrderKind.NOOP, [], 0

    sel = action.who
    if not 0 <= sel < (1 << N_SLOTS):
        raise InvalidSelectionError(f"selection {sel:#x} outside the 5-bit space")
    hp = world.hp
    nf = world.n_friendly
    mw = mask.who
    effective = []
    for s in range(N_SLOTS):
        if not sel >> s & 1:
            continue
        if not mw[s]:
            raise InvalidSelectionError(f"slot {s} is masked")
        if s < nf and hp[s] > 0:
            effective.append(s)
    if not effective:
        raise InvalidSelectionError("selection contains no live unit")

    if verb == Verb.MOVE:
        d = action.direction
        if d is None or not 0 <= d < N_DIRECTIONS:
            raise InvalidActionError(f"direction {d!r} outside the action space")
        if not mask.direction[d]:
            raise InvalidActionError(f"direction {d} is masked")
        return OrderKind.MOVE, effective, d

    # ATTACK
    e = action.enemy_idx
    if e is None:
        return OrderKind.NOOP, [], 0  # null target: selected units hold
    if not 0 <= e < world.n_enemy:
        raise InvalidTargetError(f"enemy index {e} outside the action space")
    if not mask.enemy[e]:
        raise InvalidTargetError(f"enemy index {e} is masked")
    return OrderKind.ATTACK, effective, nf + e


def decode_structured(
    action: StructuredAction, mask: ActionMask, world: WorldState
) -> list[Order]:
    """Decode a structured action into one order per friendly slot.

    Only branches the verb uses are validated.  Raises InvalidVerbError /
    InvalidSelectionError / InvalidTargetError / InvalidActionError when a
    used branch violates the mask or the space.
    """
    kind, effective, arg = _decode_core(action, mask, world)
    orders = [NOOP_ORDER] * world.n_friendly
    if kind == OrderKind.MOVE:
        o = move_order(arg)
        for s in effective:
            orders[s] = o
    elif kind == OrderKind.ATTACK:
        o = attack_order(arg)
        for s in effective:
            orders[s] = o
    return orders


def apply_structured(
    action: StructuredAction, mask: ActionMask, world: WorldState
) -> None:
    """Decode a structured action straight into the world's order arrays.

    Equivalent to set_friendly_orders(world, decode_structured(...)) minus
    the intermediate order list; validation happens before the first write,
    so a raising call leaves the installed orders untouched.
    """
    kind, effective, arg = _decode_core(action, mask, world)
    kinds = world.order_kind
    kinds[: world.n_friendly] = OrderKind.NOOP
    if kind == OrderKind.MOVE:
        dirs = world.order_dir
        for s in effective:
            kinds[s] = OrderKind.MOVE
            dirs[s] = arg
    elif kind == OrderKind.ATTACK:
        targets = world.order_target
        for s in effective:
            kinds[s] = OrderKind.ATTACK
            targets[s] = arg


def decode_flat(codes: Sequence[int], world: WorldState) -> list[Order]:
    """Decode per-unit flat codes; impossible situations degrade to no-op
    (dead unit, attack on an empty or dead slot) per the unmasked regime.
    Codes outside [0, 9 + N_E) raise InvalidActionError."""
    if len(codes) != world.n_friendly:
        raise InvalidActionError(
            f"expected {world.n_friendly} codes, got {len(codes)}"
        )
    limit = flat_action_count(world.n_enemy)
    orders = [NOOP_ORDER] * world.n_friendly
    for i, c in enumerate(codes):
        c = int(c)
        if not 0 <= c < limit:
            raise InvalidActionError(f"code {c} outside [0, {limit}) for slot {i}")
        if world.hp[i] <= 0 or c == FLAT_NOOP:
            continue
        if c <= 8:
            orders[i] = move_order(c - 1)
        else:
            e = c - 9
            if world.hp[world.n_friendly + e] > 0:
                orders[i] = attack_order(world.n_friendly + e)
    return orders
