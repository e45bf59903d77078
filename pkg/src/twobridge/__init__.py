"""Two-bridge micro-RTS benchmark suite.

A deterministic, headless grid-combat environment: two forces on a map
split by a cliff with two bridges, a capturable beacon, masked structured
or flat action spaces, shaped or sparse rewards, and a newline-JSON
environment server for out-of-process training loops.
"""

from .actions import ActionMask, StructuredAction, Verb, branch_mask, decode_flat, decode_structured, verb_mask
from .engine import (
    CombatParams,
    Order,
    OrderKind,
    Outcome,
    UnitState,
    WorldState,
    apply_attack_order,
    apply_move,
    attack_order,
    check_termination,
    enemy_ai_step,
    make_world,
    move_order,
    summarize,
    tick,
)
from .env import EnvConfig, Observation, StepResult, TwoBridgeEnv, state_hash, state_hash_hex
from .errors import (
    ConfigError,
    ImpassableStartError,
    InvalidActionError,
    InvalidSelectionError,
    InvalidTargetError,
    InvalidVerbError,
    LifecycleError,
    ProtocolError,
    ReplayMismatchError,
    TwoBridgeError,
)
from .obs import CameraState, SpatialFeatures, build_vector, render_spatial, update_camera
from .replay import load_replay, verify_replay
from .reward import (
    RewardBreakdown,
    RewardParams,
    combat_shaping,
    nav_shaping,
    pilot_reward,
    terminal_reward,
)
from .spawn import SpawnAssignment, VariantConfig, get_variant, roll_spawns, variant_catalog
from .world import Position, Region, TerrainGrid, build_two_bridge_map, find_path, grid_to_text

__version__ = "0.1.0"

__all__ = [
    "ActionMask",
    "CameraState",
    "CombatParams",
    "ConfigError",
    "EnvConfig",
    "ImpassableStartError",
    "InvalidActionError",
    "InvalidSelectionError",
    "InvalidTargetError",
    "InvalidVerbError",
    "LifecycleError",
    "Observation",
    "Order",
    "OrderKind",
    "Outcome",
    "Position",
    "ProtocolError",
    "Region",
    "ReplayMismatchError",
    "RewardBreakdown",
    "RewardParams",
    "SpatialFeatures",
    "SpawnAssignment",
    "StepResult",
    "StructuredAction",
    "TerrainGrid",
    "TwoBridgeEnv",
    "TwoBridgeError",
    "UnitState",
    "VariantConfig",
    "Verb",
    "WorldState",
    "apply_attack_order",
    "apply_move",
    "attack_order",
    "branch_mask",
    "build_two_bridge_map",
    "build_vector",
    "check_termination",
    "combat_shaping",
    "decode_flat",
    "decode_structured",
    "enemy_ai_step",
    "find_path",
    "get_variant",
    "grid_to_text",
    "load_replay",
    "make_world",
    "move_order",
    "nav_shaping",
    "pilot_reward",
    "render_spatial",
    "roll_spawns",
    "state_hash",
    "state_hash_hex",
    "summarize",
    "terminal_reward",
    "tick",
    "update_camera",
    "variant_catalog",
    "verb_mask",
    "verify_replay",
]
