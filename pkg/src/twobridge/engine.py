"""Deterministic tick engine: movement, ranged combat, reactive AI, termination.

A tick advances in fixed phases: stale-order cleanup, enemy AI refresh,
movement (ascending unit id), simultaneous attacks against the pre-phase
hp snapshot, deaths, cooldown decrement, then the termination check.
Identical (state, orders) always produces the identical successor.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from .errors import InvalidTargetError, LifecycleError
from .world import Position, TerrainGrid
from .spawn import SpawnAssignment

TICKS_PER_SECOND = 16
TICK_LIMIT = 4800  # five minutes of game time
MAX_HP = 45
_PATH_CAP = 512  # far above any shortest path on a 64x64 grid with one wall


class Outcome(enum.IntEnum):
    NAVIGATION_VICTORY = 0
    COMBAT_VICTORY = 1
    COMBAT_LOSS = 2
    TIE = 3
    TIMEOUT_LOSS = 4

    @property
    def label(self) -> str:
        return self.name.lower()


OUTCOME_LABELS = tuple(o.label for o in Outcome)


class OrderKind(enum.IntEnum):
    NOOP = 0
    MOVE = 1
    ATTACK = 2


class Order(NamedTuple):
    kind: int
    arg: int = 0


NOOP_ORDER = Order(OrderKind.NOOP, 0)


def move_order(direction: int) -> Order:
    return Order(OrderKind.MOVE, int(direction))


def attack_order(target_id: int) -> Order:
    return Order(OrderKind.ATTACK, int(target_id))


@dataclass(frozen=True)
class CombatParams:
    damage_per_shot: int = 6
    attack_range: float = 5.0
    cooldown_ticks: int = 14  # ~0.86 s at 16 ticks/s
    move_speed: float = 3.15 / TICKS_PER_SECOND  # world units per tick
    acquisition_range: float = 6.0
    unit_radius: float = 0.5
    capture_radius: float = 2.0


DEFAULT_PARAMS = CombatParams()


@dataclass(frozen=True)
class UnitState:
    """Read-only view of one unit."""

    id: int
    team: str  # "friendly" | "enemy"
    pos: Position
    hp: int
    cooldown_remaining: int
    alive: bool
    provoked: bool
    current_order: Order


class WorldSummary(NamedTuple):
    """Aggregates used by reward shaping; distances are -1.0 when undefined."""

    friendly_alive: int
    enemy_alive: int
    friendly_bits: int
    enemy_bits: int
    hp_friendly: float
    hp_enemy: float
    avg_beacon_dist: float
    avg_enemy_centroid_dist: float
    leading_beacon_dist: float


@dataclass
class WorldState:
    """Full simulation state, structure-of-arrays; owned by one episode."""

    grid: TerrainGrid
    params: CombatParams
    n_friendly: int
    pos: np.ndarray  # float64 (n, 2)
    hp: np.ndarray  # int32 (n,)
    cooldown: np.ndarray  # int32 (n,)
    provoked: np.ndarray  # uint8 (n,)
    order_kind: np.ndarray  # int8 (n,)
    order_dir: np.ndarray  # int8 (n,)
    order_target: np.ndarray  # int16 (n,)
    path_cells: np.ndarray  # int32 (n, _PATH_CAP) planned attack-move paths
    path_len: np.ndarray  # int32 (n,)
    path_idx: np.ndarray  # int32 (n,)
    path_goal: np.ndarray  # int32 (n,)
    beacon: Position
    tick: int = 0
    outcome: Outcome | None = None
    rng: np.random.Generator | None = None
    _dmg_scratch: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]
    _astar_scratch: tuple = field(default=None, repr=False)  # type: ignore[assignment]

    def __post_init__(self):
        if self._dmg_scratch is None:
            self._dmg_scratch = np.zeros(self.pos.shape[0], dtype=np.int32)
        if self._astar_scratch is None:
            self._astar_scratch = _alloc_astar_scratch(self.grid)
        # Stable array references for the tick kernel; arrays are mutated in
        # place and never rebound, so this holds for the world's lifetime.
        self._run_args = (
            self.grid.passable,
            self.pos,
            self.hp,
            self.cooldown,
            self.provoked,
            self.order_kind,
            self.order_dir,
            self.order_target,
            self.path_cells,
            self.path_len,
            self.path_idx,
            self.path_goal,
            self._astar_scratch,
            self._dmg_scratch,
        )
        p = self.params
        self._param_args = (
            p.damage_per_shot,
            p.attack_range,
            p.cooldown_ticks,
            p.move_speed,
            p.acquisition_range,
            p.capture_radius,
        )
        self._sum_f = np.empty(5, dtype=np.float64)
        self._sum_i = np.empty(4, dtype=np.int64)

    @property
    def astar_scratch(self) -> tuple:
        return self._astar_scratch

    @property
    def n_units(self) -> int:
        return self.pos.shape[0]

    @property
    def n_enemy(self) -> int:
        return self.n_units - self.n_friendly

    @property
    def friendly_alive(self) -> int:
        return int(np.count_nonzero(self.hp[: self.n_friendly] > 0))

    @property
    def enemy_alive(self) -> int:
        return int(np.count_nonzero(self.hp[self.n_friendly :] > 0))

    def alive(self, i: int) -> bool:
        return self.hp[i] > 0

    def unit(self, i: int) -> UnitState:
        if not 0 <= i < self.n_units:
            raise IndexError(f"unit id {i} out of range")
        kind = int(self.order_kind[i])
        arg = int(self.order_dir[i]) if kind == OrderKind.MOVE else int(self.order_target[i])
        return UnitState(
            id=i,
            team="friendly" if i < self.n_friendly else "enemy",
            pos=Position(float(self.pos[i, 0]), float(self.pos[i, 1])),
            hp=int(self.hp[i]),
            cooldown_remaining=int(self.cooldown[i]),
            alive=bool(self.hp[i] > 0),
            provoked=bool(self.provoked[i]),
            current_order=Order(kind, arg if kind != OrderKind.NOOP else 0),
        )

    def units(self) -> list[UnitState]:
        return [self.unit(i) for i in range(self.n_units)]

    def copy(self) -> "WorldState":
        return replace(
            self,
            pos=self.pos.copy(),
            hp=self.hp.copy(),
            cooldown=self.cooldown.copy(),
            provoked=self.provoked.copy(),
            order_kind=self.order_kind.copy(),
            order_dir=self.order_dir.copy(),
            order_target=self.order_target.copy(),
            path_cells=self.path_cells.copy(),
            path_len=self.path_len.copy(),
            path_idx=self.path_idx.copy(),
            path_goal=self.path_goal.copy(),
            _dmg_scratch=self._dmg_scratch.copy(),
            _astar_scratch=_alloc_astar_scratch(self.grid),
        )


def _alloc_astar_scratch(grid: TerrainGrid) -> tuple:
    """Planner pack for one world: the grid's edge bits plus reusable
    buffers (costs, stamps, backtrack, heap, generation counter)."""
    n = grid.width * grid.height
    return (
        grid.edge_bits,
        np.empty(n, dtype=np.int64),
        np.zeros(n, dtype=np.int32),
        np.zeros(n, dtype=np.int32),
        np.empty(n, dtype=np.int32),
        np.empty(8 * n, dtype=np.int64),
        np.zeros(1, dtype=np.int64),
    )


def make_world(
    grid: TerrainGrid,
    assignment: SpawnAssignment,
    params: CombatParams = DEFAULT_PARAMS,
    rng: np.random.Generator | None = None,
) -> WorldState:
    """Fresh world at tick 0 from a spawn assignment; everyone at full hp,
    zero cooldown, no orders, enemies unprovoked."""
    n_friendly = len(assignment.friendly_positions)
    n = n_friendly + len(assignment.enemy_positions)
    pos = np.empty((n, 2), dtype=np.float64)
    for i, p in enumerate(assignment.friendly_positions + assignment.enemy_positions):
        pos[i, 0] = p.x
        pos[i, 1] = p.y
    return WorldState(
        grid=grid,
        params=params,
        n_friendly=n_friendly,
        pos=pos,
        hp=np.full(n, MAX_HP, dtype=np.int32),
        cooldown=np.zeros(n, dtype=np.int32),
        provoked=np.zeros(n, dtype=np.uint8),
        order_kind=np.zeros(n, dtype=np.int8),
        order_dir=np.zeros(n, dtype=np.int8),
        order_target=np.zeros(n, dtype=np.int16),
        path_cells=np.zeros((n, _PATH_CAP), dtype=np.int32),
        path_len=np.zeros(n, dtype=np.int32),
        path_idx=np.zeros(n, dtype=np.int32),
        path_goal=np.full(n, -1, dtype=np.int32),
        beacon=assignment.beacon_position,
        rng=rng,
    )


def set_friendly_orders(world: WorldState, orders: Sequence[Order]) -> None:
    """Install one order per friendly slot; dead slots are forced to no-op."""
    if len(orders) != world.n_friendly:
        raise ValueError(f"expected {world.n_friendly} orders, got {len(orders)}")
    hp = world.hp
    kinds = world.order_kind
    dirs = world.order_dir
    targets = world.order_target
    for i, o in enumerate(orders):
        k = o.kind
        if k == OrderKind.NOOP or hp[i] <= 0:
            kinds[i] = OrderKind.NOOP
            continue
        kinds[i] = k
        if k == OrderKind.MOVE:
            dirs[i] = o.arg
        else:
            if not 0 <= o.arg < world.n_units:
                raise InvalidTargetError(f"attack target {o.arg} not in world")
            targets[i] = o.arg


def run_ticks(world: WorldState, k_ticks: int, tick_limit: int = TICK_LIMIT) -> Outcome | None:
    """Advance up to k_ticks with current orders held; stops the tick an
    outcome is reached and freezes the world."""
    if world.outcome is not None:
        raise LifecycleError("world is terminal; no further ticks allowed")
    t, oc = _kernels.run_window(
        *world._run_args,
        world.beacon.x,
        world.beacon.y,
        world.tick,
        tick_limit,
        world.n_friendly,
        *world._param_args,
        k_ticks,
    )
    world.tick = int(t)
    world.outcome = Outcome(oc) if oc >= 0 else None
    return world.outcome


def tick(world: WorldState, friendly_orders: Sequence[Order]) -> WorldState:
    """One full engine tick with the given friendly orders (in place)."""
    if world.outcome is not None:
        raise LifecycleError("world is terminal; no further ticks allowed")
    set_friendly_orders(world, friendly_orders)
    run_ticks(world, 1)
    return world


def apply_move(
    pos: tuple[float, float],
    direction: int,
    grid: TerrainGrid,
    move_speed: float = DEFAULT_PARAMS.move_speed,
) -> Position:
    """Position after one tick of movement in a compass direction; hard stop
    (unchanged) if the destination cell is impassable or out of bounds."""
    if not 0 <= direction < 8:
        raise ValueError(f"direction {direction} out of range")
    buf = np.array([[pos[0], pos[1]]], dtype=np.float64)
    _kernels.try_move_direction(grid.passable, buf, 0, direction, move_speed)
    return Position(float(buf[0, 0]), float(buf[0, 1]))


def apply_attack_order(world: WorldState, unit_id: int, target_id: int) -> None:
    """Resolve one tick of a single unit's attack order in isolation.

    Dead target degrades the order to no-op; out of range advances one step
    along the planned path; in range fires iff cooldown is zero (then the
    cooldown resets), otherwise holds.  The unit's cooldown bookkeeping for
    the tick is included.  Inside a full tick the same effects come from the
    movement/attack/cooldown phases applied to all units.
    """
    if not 0 <= target_id < world.n_units:
        raise InvalidTargetError(f"attack target {target_id} not in world")
    p = world.params
    i = unit_id
    if world.hp[i] <= 0:
        return
    if world.hp[target_id] <= 0:
        world.order_kind[i] = OrderKind.NOOP
        if world.cooldown[i] > 0:
            world.cooldown[i] -= 1
        return
    world.order_kind[i] = OrderKind.ATTACK
    world.order_target[i] = target_id
    dx = world.pos[i, 0] - world.pos[target_id, 0]
    dy = world.pos[i, 1] - world.pos[target_id, 1]
    in_range = dx * dx + dy * dy <= p.attack_range**2
    if not in_range:
        _kernels.advance_along_path(
            world.grid.passable,
            world.pos,
            world.path_cells,
            world.path_len,
            world.path_idx,
            world.path_goal,
            world._astar_scratch,
            i,
            world.pos[target_id, 0],
            world.pos[target_id, 1],
            p.move_speed,
        )
        if world.cooldown[i] > 0:
            world.cooldown[i] -= 1
        return
    if world.cooldown[i] == 0:
        world.hp[target_id] = max(0, int(world.hp[target_id]) - p.damage_per_shot)
        if target_id >= world.n_friendly:
            world.provoked[target_id] = 1
        if world.hp[target_id] == 0:
            world.order_kind[target_id] = OrderKind.NOOP
        world.cooldown[i] = p.cooldown_ticks - 1  # reset, then the tick's decrement
    else:
        world.cooldown[i] -= 1


def enemy_ai_step(world: WorldState) -> list[Order]:
    """Refresh enemy orders: unprovoked enemies idle; an enemy becomes
    provoked (sticky) when an alive friendly is within acquisition range, and
    a provoked enemy attacks the nearest alive friendly (ties to lower id).
    Updates provoked flags and enemy order slots; returns the enemy orders.
    """
    _kernels.phase_enemy_ai(
        world.pos,
        world.hp,
        world.provoked,
        world.order_kind,
        world.order_target,
        world.n_friendly,
        world.n_units,
        world.params.acquisition_range,
    )
    out = []
    for e in range(world.n_friendly, world.n_units):
        if world.order_kind[e] == OrderKind.ATTACK:
            out.append(attack_order(int(world.order_target[e])))
        else:
            out.append(NOOP_ORDER)
    return out


def check_termination(world: WorldState, tick_limit: int = TICK_LIMIT) -> Outcome | None:
    """Outcome for the current state, or None while the episode runs.

    Priority: beacon capture, tie, combat victory, combat loss, timeout.
    """
    oc = _kernels.check_termination_kernel(
        world.pos,
        world.hp,
        world.beacon.x,
        world.beacon.y,
        world.tick,
        tick_limit,
        world.params.capture_radius,
        world.n_friendly,
        world.n_units,
    )
    return Outcome(oc) if oc >= 0 else None


def summarize(world: WorldState) -> WorldSummary:
    """Shaping aggregates for the current state (single kernel pass)."""
    out_f = world._sum_f
    out_i = world._sum_i
    _kernels.world_summary(
        world.pos, world.hp, world.beacon.x, world.beacon.y, world.n_friendly, out_f, out_i
    )
    return WorldSummary(
        int(out_i[0]),
        int(out_i[1]),
        int(out_i[2]),
        int(out_i[3]),
        float(out_f[0]),
        float(out_f[1]),
        float(out_f[2]),
        float(out_f[3]),
        float(out_f[4]),
    )
