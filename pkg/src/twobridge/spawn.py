"""Variant catalog and randomized spawn assignment.

Nine variants: force ratios V1 (5v3), V2 (5v5), V3 (5v8) crossed with
layouts Base, Combat, Navigate.  Spawn rolls draw regions and points in a
fixed per-layout order so a seed reproduces the whole assignment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .world import Position, Region, default_map, sample_point_in_region

N_FRIENDLY = 5
LAYOUTS = ("Base", "Combat", "Navigate")
_ENEMY_COUNTS = {1: 3, 2: 5, 3: 8}
MIN_SEPARATION = 1.0  # two unit radii
_MAX_PLACE_TRIES = 1000


@dataclass(frozen=True)
class VariantConfig:
    id: str
    friendly_count: int
    enemy_count: int
    layout: str


def variant_catalog() -> list[VariantConfig]:
    """All nine variants in id order (V1_Base .. V3_Navigate)."""
    out = []
    for k in (1, 2, 3):
        for layout in LAYOUTS:
            out.append(
                VariantConfig(
                    id=f"V{k}_{layout}",
                    friendly_count=N_FRIENDLY,
                    enemy_count=_ENEMY_COUNTS[k],
                    layout=layout,
                )
            )
    return out


def get_variant(variant_id: str) -> VariantConfig:
    for v in variant_catalog():
        if v.id == variant_id:
            return v
    raise ConfigError(f"unknown variant {variant_id!r}")


def catalog_payload() -> list[dict]:
    """Machine-readable catalog for config export and the wire handshake."""
    return [
        {
            "id": v.id,
            "friendly_count": v.friendly_count,
            "enemy_count": v.enemy_count,
            "layout": v.layout,
        }
        for v in variant_catalog()
    ]


@dataclass(frozen=True)
class SpawnAssignment:
    p1_region: str
    p2_region: str
    beacon_region: str
    friendly_positions: tuple[Position, ...]
    enemy_positions: tuple[Position, ...]
    beacon_position: Position
    camera_initial: Position


def _pick(rng: np.random.Generator, options: list[Region]) -> Region:
    return options[int(rng.integers(len(options)))]


def _place_group(region: Region, count: int, rng: np.random.Generator) -> list[Position]:
    """Uniform points in the region with min pairwise separation."""
    placed: list[Position] = []
    for _ in range(count):
        for _try in range(_MAX_PLACE_TRIES):
            p = sample_point_in_region(region, rng)
            if all(
                (p.x - q.x) ** 2 + (p.y - q.y) ** 2 >= MIN_SEPARATION**2
                for q in placed
            ):
                placed.append(p)
                break
        else:
            raise RuntimeError(f"could not place {count} units in {region.id}")
    return placed


def _centroid(points: list[Position]) -> Position:
    xs = sum(p.x for p in points) / len(points)
    ys = sum(p.y for p in points) / len(points)
    return Position(xs, ys)


def roll_spawns(
    config: VariantConfig,
    rng: np.random.Generator,
    regions: list[Region] | None = None,
) -> SpawnAssignment:
    """Roll regions and unit/beacon points for one episode.

    Layout rules: Base puts friendlies on the left and both the beacon and
    the enemy group on the right (distinct regions); Combat mirrors the
    beacon to the left with both forces on the right; Navigate puts enemies
    on the left and friendlies plus beacon on the right (distinct regions).
    Draw order is fixed per layout so seeds reproduce assignments.
    """
    if regions is None:
        regions = default_map()[1]
    left = [r for r in regions if r.side == "left"]
    right = [r for r in regions if r.side == "right"]

    if config.layout == "Base":
        p1 = _pick(rng, left)
        friendly = _place_group(p1, config.friendly_count, rng)
        beacon_r = _pick(rng, right)
        beacon = sample_point_in_region(beacon_r, rng)
        p2 = _pick(rng, [r for r in right if r.id != beacon_r.id])
        enemy = _place_group(p2, config.enemy_count, rng)
    elif config.layout == "Combat":
        beacon_r = _pick(rng, left)
        beacon = sample_point_in_region(beacon_r, rng)
        p1 = _pick(rng, right)
        friendly = _place_group(p1, config.friendly_count, rng)
        p2 = _pick(rng, [r for r in right if r.id != p1.id])
        enemy = _place_group(p2, config.enemy_count, rng)
    elif config.layout == "Navigate":
        p2 = _pick(rng, left)
        enemy = _place_group(p2, config.enemy_count, rng)
        p1 = _pick(rng, right)
        friendly = _place_group(p1, config.friendly_count, rng)
        beacon_r = _pick(rng, [r for r in right if r.id != p1.id])
        beacon = sample_point_in_region(beacon_r, rng)
    else:
        raise ConfigError(f"unknown layout {config.layout!r}")

    return SpawnAssignment(
        p1_region=p1.id,
        p2_region=p2.id,
        beacon_region=beacon_r.id,
        friendly_positions=tuple(friendly),
        enemy_positions=tuple(enemy),
        beacon_position=beacon,
        camera_initial=_centroid(friendly),
    )
