"""Observation builders: feature vector, spatial planes, camera handling.

The vector layout is fixed per variant: five friendly slots of
(x, y, hp, cooldown, dist_to_beacon), N_E enemy slots of (x, y, hp,
cooldown), then beacon x/y, elapsed seconds, enemies remaining.  Dead
slots are zero-filled.  Coordinates and distances normalize by map size,
hp by max hp, cooldown by the cooldown period; elapsed seconds and the
enemy count stay raw.

Spatial planes are float32 in [0, 1]: a 17-channel camera-relative screen
and a 7-channel whole-map minimap (one cell per pixel, camera-invariant).
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import _kernels
from .engine import MAX_HP, TICKS_PER_SECOND, WorldState
from .world import Position

SCREEN_CHANNELS = 17
MINIMAP_CHANNELS = 7
SCREEN_RESOLUTION = 64
SCREEN_EXTENT = 24.0  # world units covered by the screen window

SCREEN_CHANNEL_NAMES = (
    "passability",
    "friendly_presence",
    "enemy_presence",
    "friendly_hp",
    "enemy_hp",
    "beacon",
    "friendly_cooldown",
    "enemy_cooldown",
    "selection",
    "map_extent",
) + tuple(f"reserved_{i}" for i in range(SCREEN_CHANNELS - 10))

MINIMAP_CHANNEL_NAMES = (
    "passability",
    "friendly_presence",
    "enemy_presence",
    "friendly_hp",
    "enemy_hp",
    "beacon",
    "reserved_0",
)

CAMERA_FREE = "free"
CAMERA_LOCKED = "locked"


class SpatialFeatures(NamedTuple):
    screen: np.ndarray  # float32 (17, 64, 64)
    minimap: np.ndarray  # float32 (7, 64, 64)


class CameraState(NamedTuple):
    mode: str  # "free" | "locked"
    center: Position
    extent: float = SCREEN_EXTENT


def vector_length(n_enemy: int) -> int:
    return 5 * 5 + 4 * n_enemy + 4


def vector_layout(n_enemy: int) -> dict[str, slice]:
    """Named slices into the feature vector, in layout order."""
    out: dict[str, slice] = {}
    k = 0
    for f in range(5):
        out[f"friendly_{f}"] = slice(k, k + 5)
        k += 5
    for e in range(n_enemy):
        out[f"enemy_{e}"] = slice(k, k + 4)
        k += 4
    out["beacon"] = slice(k, k + 2)
    out["elapsed_seconds"] = slice(k + 2, k + 3)
    out["enemies_remaining"] = slice(k + 3, k + 4)
    return out


def build_vector(world: WorldState) -> np.ndarray:
    """Feature vector for the current state (float64, fixed layout)."""
    # layout reserves exactly five friendly slots; anything else would
    # silently misalign the enemy block
    if world.n_friendly != 5:
        raise ValueError(f"vector layout needs 5 friendly slots, world has {world.n_friendly}")
    out = np.empty(vector_length(world.n_enemy), dtype=np.float64)
    _kernels.vector_obs(
        world.pos,
        world.hp,
        world.cooldown,
        world.beacon.x,
        world.beacon.y,
        world.tick,
        world.n_friendly,
        MAX_HP,
        world.params.cooldown_ticks,
        float(world.grid.width),
        TICKS_PER_SECOND,
        out,
    )
    return out


def initial_camera(mode: str, center: Position) -> CameraState:
    return CameraState(mode=mode, center=center)


def update_camera(camera: CameraState, world: WorldState) -> CameraState:
    """Free cameras never move; a locked camera recenters on the alive
    friendly centroid every step and holds its last center once none live.
    The center is not terrain-bound (it may sit over the cliff)."""
    if camera.mode == CAMERA_FREE:
        return camera
    alive = world.hp[: world.n_friendly] > 0
    if not alive.any():
        return camera
    c = world.pos[: world.n_friendly][alive].mean(axis=0)
    return CameraState(camera.mode, Position(float(c[0]), float(c[1])), camera.extent)


def render_spatial(
    world: WorldState,
    camera: CameraState,
    selection: np.ndarray | None = None,
) -> SpatialFeatures:
    """Rasterize the screen (camera window) and minimap (whole map).

    `selection` marks friendly slots drawn into the screen's selection
    channel (the most recent selection; alive units only).
    """
    if selection is None:
        selection = np.zeros(world.n_friendly, dtype=np.uint8)
    screen = np.empty(
        (SCREEN_CHANNELS, SCREEN_RESOLUTION, SCREEN_RESOLUTION), dtype=np.float32
    )
    _kernels.render_screen(
        world.grid.passable,
        world.pos,
        world.hp,
        world.cooldown,
        np.asarray(selection, dtype=np.uint8),
        world.beacon.x,
        world.beacon.y,
        camera.center.x,
        camera.center.y,
        camera.extent,
        world.n_friendly,
        MAX_HP,
        world.params.cooldown_ticks,
        screen,
    )
    minimap = np.empty((MINIMAP_CHANNELS, world.grid.height, world.grid.width), dtype=np.float32)
    _kernels.render_minimap(
        world.grid.passable,
        world.pos,
        world.hp,
        world.beacon.x,
        world.beacon.y,
        world.n_friendly,
        MAX_HP,
        minimap,
    )
    return SpatialFeatures(screen=screen, minimap=minimap)
