"""Agent-facing environment: profiles, stepping, hashing, replay hooks.

One agent step decodes an action, holds the resulting orders for K engine
ticks (default 8, giving 600 agent steps over the five-minute limit), and
returns the observation, the next legality mask, an exact reward breakdown,
and termination info.  If the episode ends mid-window the step ends early
and the terminal payout lands in that step's breakdown.

Profiles:
    pilot-nsf  flat per-unit codes, vector obs only, pilot reward
    pilot-sf   flat per-unit codes, vector + spatial obs, pilot reward
    exp2       structured actions, verb-level mask, shaped reward, free camera
    exp3       structured actions, branch-level mask, shaped reward, locked camera
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .actions import (
    ActionMask,
    StructuredAction,
    apply_structured,
    branch_mask,
    decode_flat,
)
from . import _kernels
from .engine import (
    MAX_HP,
    TICK_LIMIT,
    TICKS_PER_SECOND,
    CombatParams,
    DEFAULT_PARAMS,
    Outcome,
    WorldState,
    WorldSummary,
    make_world,
    set_friendly_orders,
    summarize,
)
from .errors import ConfigError, LifecycleError
from .obs import (
    CAMERA_FREE,
    CAMERA_LOCKED,
    CameraState,
    SpatialFeatures,
    build_vector,
    initial_camera,
    render_spatial,
    update_camera,
    vector_length,
)
from .reward import (
    DEFAULT_REWARD_PARAMS,
    RewardBreakdown,
    RewardParams,
    ZERO_BREAKDOWN,
    pilot_breakdown,
    shaped_breakdown,
)
from .spawn import SpawnAssignment, get_variant, roll_spawns
from .world import default_map

PROFILES = ("pilot-nsf", "pilot-sf", "exp2", "exp3")

_PROFILE_STRUCTURED = {"pilot-nsf": False, "pilot-sf": False, "exp2": True, "exp3": True}
_PROFILE_SPATIAL = {"pilot-nsf": False, "pilot-sf": True, "exp2": True, "exp3": True}
_PROFILE_CAMERA = {
    "pilot-nsf": CAMERA_FREE,
    "pilot-sf": CAMERA_FREE,
    "exp2": CAMERA_FREE,
    "exp3": CAMERA_LOCKED,
}


@dataclass(frozen=True)
class EnvConfig:
    variant: str
    profile: str
    seed: int = 0
    ticks_per_agent_step: int = 8
    tick_limit: int = TICK_LIMIT
    spatial: bool | None = None  # None = profile default
    reward_params: RewardParams = field(default_factory=RewardParams)
    combat_params: CombatParams = field(default_factory=CombatParams)


def config_to_dict(config: EnvConfig) -> dict:
    return asdict(config)


def config_from_dict(d: dict) -> EnvConfig:
    d = dict(d)
    if "reward_params" in d and isinstance(d["reward_params"], dict):
        d["reward_params"] = RewardParams(**d["reward_params"])
    if "combat_params" in d and isinstance(d["combat_params"], dict):
        d["combat_params"] = CombatParams(**d["combat_params"])
    return EnvConfig(**d)


class Observation:
    """Vector features plus optional spatial planes."""

    __slots__ = ("vector", "spatial")

    def __init__(self, vector: np.ndarray, spatial: SpatialFeatures | None):
        self.vector = vector
        self.spatial = spatial


@dataclass
class StepResult:
    observation: Observation
    mask: ActionMask | np.ndarray | None
    reward: RewardBreakdown
    done: bool
    outcome: Outcome | None
    info: dict


def state_hash(world: WorldState) -> int:
    """64-bit canonical hash of the semantic world state.

    Covers tick, positions (rounded to 1e-9), hp, cooldowns, provocation,
    orders, planned paths, beacon, and outcome; excludes the rng.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(struct.pack("<q", world.tick))
    h.update(np.ascontiguousarray(np.round(world.pos, 9)).tobytes())
    h.update(world.hp.tobytes())
    h.update(world.cooldown.tobytes())
    h.update(world.provoked.tobytes())
    h.update(world.order_kind.tobytes())
    h.update(world.order_dir.tobytes())
    h.update(world.order_target.tobytes())
    for i in range(world.n_units):
        ln = int(world.path_len[i])
        h.update(struct.pack("<iii", ln, int(world.path_idx[i]), int(world.path_goal[i])))
        if ln > 0:
            h.update(world.path_cells[i, :ln].tobytes())
    h.update(struct.pack("<dd", round(world.beacon.x, 9), round(world.beacon.y, 9)))
    h.update(struct.pack("<q", -1 if world.outcome is None else int(world.outcome)))
    return int.from_bytes(h.digest(), "big")


def state_hash_hex(world: WorldState) -> str:
    return f"{state_hash(world):016x}"


class TwoBridgeEnv:
    """One episode at a time on the two-bridge map."""

    def __init__(self, config: EnvConfig, replay_path: str | None = None):
        self.config = config
        self.variant = get_variant(config.variant)  # raises ConfigError
        if config.profile not in PROFILES:
            raise ConfigError(f"unknown profile {config.profile!r}")
        if config.ticks_per_agent_step < 1:
            raise ConfigError("ticks_per_agent_step must be >= 1")
        if config.tick_limit < 1:
            raise ConfigError("tick_limit must be >= 1")
        self.grid, self.regions = default_map()
        self.structured = _PROFILE_STRUCTURED[config.profile]
        self.spatial_enabled = (
            _PROFILE_SPATIAL[config.profile] if config.spatial is None else config.spatial
        )
        self._camera_mode = _PROFILE_CAMERA[config.profile]
        self._replay_path = replay_path
        self._replay = None
        self._world: WorldState | None = None
        self._camera: CameraState | None = None
        self._assignment: SpawnAssignment | None = None
        self._summary = None  # post-step aggregates, reused as next step's prev
        self._done = True
        self._step_idx = 0
        # Prebuilt verb-level masks, one per (move legal, attack legal)
        # combination; the arrays are shared across steps, so callers must
        # treat returned masks as read-only.
        ones_who = np.ones(5, dtype=bool)
        ones_dir = np.ones(8, dtype=bool)
        ones_enemy = np.ones(self.variant.enemy_count + 1, dtype=bool)
        self._vm_cache = {}
        for mv in (False, True):
            for at in (False, True):
                vm = np.array([True, mv, at])
                self._vm_cache[(mv, at)] = (
                    vm,
                    ActionMask(verb=vm, who=ones_who, direction=ones_dir, enemy=ones_enemy),
                )
        self._selection = np.zeros(5, dtype=np.uint8)
        self._decode_mask: ActionMask | None = None
        self._vec_len = vector_length(self.variant.enemy_count)

    # -- lifecycle ---------------------------------------------------------

    @property
    def world(self) -> WorldState:
        if self._world is None:
            raise LifecycleError("reset() has not been called")
        return self._world

    @property
    def camera(self) -> CameraState:
        if self._camera is None:
            raise LifecycleError("reset() has not been called")
        return self._camera

    @property
    def done(self) -> bool:
        return self._done

    @property
    def spawn_assignment(self) -> SpawnAssignment:
        if self._assignment is None:
            raise LifecycleError("reset() has not been called")
        return self._assignment

    def reset(self, seed: int | None = None) -> StepResult:
        """Start a fresh episode; same config and seed reproduce it exactly."""
        ep_seed = self.config.seed if seed is None else seed
        rng = np.random.Generator(np.random.PCG64(ep_seed))
        self._assignment = roll_spawns(self.variant, rng, self.regions)
        self._world = make_world(
            self.grid, self._assignment, self.config.combat_params, rng=rng
        )
        self._camera = initial_camera(self._camera_mode, self._assignment.camera_initial)
        self._selection = np.zeros(5, dtype=np.uint8)
        self._summary = summarize(self._world)
        self._step_idx = 0
        self._done = False
        result = StepResult(
            observation=self._build_observation(),
            mask=self._build_mask(),
            reward=ZERO_BREAKDOWN,
            done=False,
            outcome=None,
            info=self._info(
                spawn={
                    "p1_region": self._assignment.p1_region,
                    "p2_region": self._assignment.p2_region,
                    "beacon_region": self._assignment.beacon_region,
                },
                seed=ep_seed,
            ),
        )
        if self._replay_path is not None:
            from .replay import ReplayWriter

            if self._replay is not None:
                self._replay.close()
            self._replay = ReplayWriter(self._replay_path)
            self._replay.header(self.config, self._assignment, ep_seed, self._world)
        return result

    def step(self, action: Any) -> StepResult:
        """Decode, hold orders for the tick window, and settle the step."""
        if self._world is None:
            raise LifecycleError("reset() has not been called")
        if self._done:
            raise LifecycleError("episode is over; call reset()")
        world = self._world
        self._apply_action(action)
        prev = self._summary
        config = self.config
        vec = np.empty(self._vec_len, dtype=np.float64)
        t, oc = _kernels.step_window(
            *world._run_args,
            world.beacon.x,
            world.beacon.y,
            world.tick,
            config.tick_limit,
            world.n_friendly,
            *world._param_args,
            config.ticks_per_agent_step,
            MAX_HP,
            float(self.grid.width),
            TICKS_PER_SECOND,
            vec,
            world._sum_f,
            world._sum_i,
        )
        world.tick = int(t)
        outcome = Outcome(oc) if oc >= 0 else None
        world.outcome = outcome
        of = world._sum_f
        oi = world._sum_i
        cur = WorldSummary(
            int(oi[0]),
            int(oi[1]),
            int(oi[2]),
            int(oi[3]),
            float(of[0]),
            float(of[1]),
            float(of[2]),
            float(of[3]),
            float(of[4]),
        )
        self._summary = cur
        if self.structured:
            breakdown = shaped_breakdown(prev, cur, outcome, config.reward_params)
        else:
            breakdown = pilot_breakdown(prev, cur, outcome)
        self._done = outcome is not None
        self._step_idx += 1
        self._camera = update_camera(self._camera, world)
        spatial = (
            render_spatial(world, self._camera, self._selection)
            if self.spatial_enabled
            else None
        )
        result = StepResult(
            observation=Observation(vec, spatial),
            mask=self._build_mask(),
            reward=breakdown,
            done=self._done,
            outcome=outcome,
            info=self._info(),
        )
        if self._replay is not None:
            self._replay.record(self._step_idx, action, self, result)
            if self._done:
                self._replay.close()
                self._replay = None
        return result

    def close(self) -> None:
        if self._replay is not None:
            self._replay.close()
            self._replay = None

    # -- internals ---------------------------------------------------------

    def _apply_action(self, action: Any) -> None:
        world = self._world
        if not self.structured:
            set_friendly_orders(world, decode_flat(action, world))
            self._update_selection_flat(action)
            return
        if not isinstance(action, StructuredAction):
            action = StructuredAction(*action)
        apply_structured(action, self._decode_mask, world)
        if self.spatial_enabled:
            sel = np.zeros(5, dtype=np.uint8)
            if action.verb != 0:
                for s in range(world.n_friendly):
                    if action.who >> s & 1 and world.hp[s] > 0:
                        sel[s] = 1
            self._selection = sel

    def _update_selection_flat(self, codes) -> None:
        if not self.spatial_enabled:
            return
        world = self._world
        sel = np.zeros(5, dtype=np.uint8)
        for i in range(min(len(codes), world.n_friendly)):
            if int(codes[i]) != 0 and world.hp[i] > 0:
                sel[i] = 1
        self._selection = sel

    def _build_mask(self):
        world = self._world
        profile = self.config.profile
        s = self._summary
        counts = (s.friendly_alive, s.enemy_alive)
        if profile == "exp3":
            m = branch_mask(world, counts)
            self._decode_mask = m
            return m
        if profile == "exp2":
            live = world.outcome is None
            vm, am = self._vm_cache[(live and s.friendly_alive >= 1, live and s.enemy_alive >= 1)]
            self._decode_mask = am
            return vm
        self._decode_mask = None
        return None

    def _build_observation(self) -> Observation:
        world = self._world
        vector = build_vector(world)
        spatial = (
            render_spatial(world, self._camera, self._selection)
            if self.spatial_enabled
            else None
        )
        return Observation(vector, spatial)

    def _info(self, **extra) -> dict:
        s = self._summary
        info = {
            "step": self._step_idx,
            "tick": self._world.tick,
            "friendly_alive": s.friendly_alive,
            "enemy_alive": s.enemy_alive,
        }
        if extra:
            info.update(extra)
        return info
