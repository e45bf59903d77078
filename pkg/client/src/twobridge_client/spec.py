"""Typed view of the server's spec handshake.

ClientEnvSpec keeps the raw payload verbatim and answers the two
questions a trainer asks: what arrays will observations contain, and
what is the action space (with which level of masking) for a given
(variant, profile) pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .errors import WireError


@dataclass(frozen=True)
class VariantSpec:
    id: str
    friendly_count: int
    enemy_count: int
    layout: str
    vector_length: int
    flat_action_codes: int


@dataclass(frozen=True)
class ProfileSpec:
    id: str
    actions: str  # "flat" | "structured"
    masking: str | None  # None | "verb" | "branch"
    spatial: bool
    reward: str
    camera: str


@dataclass(frozen=True)
class PlaneSpec:
    channels: int
    resolution: int
    channel_names: tuple[str, ...]
    extent: float | None = None


@dataclass(frozen=True)
class ObservationDesc:
    """Arrays in one observation: vector always, planes when spatial."""

    vector_length: int
    screen_shape: tuple[int, int, int] | None
    minimap_shape: tuple[int, int, int] | None


@dataclass(frozen=True)
class ActionDesc:
    kind: str  # "flat" | "structured"
    units: int
    flat_codes: int | None  # per-unit code count for flat spaces
    directions: int
    enemy_slots: int
    masking: str | None


class ClientEnvSpec:
    def __init__(self, payload: dict):
        try:
            self.protocol: int = payload["protocol"]
            self.suite: str = payload["suite"]
            self.map_size: int = payload["map_size"]
            self.variants: dict[str, VariantSpec] = {
                v["id"]: VariantSpec(**v) for v in payload["variants"]
            }
            self.profiles: dict[str, ProfileSpec] = {
                p["id"]: ProfileSpec(**p) for p in payload["profiles"]
            }
            self.directions: tuple[str, ...] = tuple(payload["directions"])
            self.outcomes: tuple[str, ...] = tuple(payload["outcomes"])
            self.reward_fields: tuple[str, ...] = tuple(payload["reward_fields"])
            self.screen = PlaneSpec(
                channels=payload["screen"]["channels"],
                resolution=payload["screen"]["resolution"],
                channel_names=tuple(payload["screen"]["channel_names"]),
                extent=payload["screen"]["extent"],
            )
            self.minimap = PlaneSpec(
                channels=payload["minimap"]["channels"],
                resolution=payload["minimap"]["resolution"],
                channel_names=tuple(payload["minimap"]["channel_names"]),
            )
        except (KeyError, TypeError) as e:
            raise WireError(f"malformed spec payload: {e!r}") from None
        self.raw: dict[str, Any] = payload

    def variant(self, variant_id: str) -> VariantSpec:
        try:
            return self.variants[variant_id]
        except KeyError:
            raise KeyError(f"unknown variant {variant_id!r}; server offers "
                           f"{sorted(self.variants)}") from None

    def profile(self, profile_id: str) -> ProfileSpec:
        try:
            return self.profiles[profile_id]
        except KeyError:
            raise KeyError(f"unknown profile {profile_id!r}; server offers "
                           f"{sorted(self.profiles)}") from None

    def observation_desc(self, variant_id: str, profile_id: str) -> ObservationDesc:
        variant = self.variant(variant_id)
        profile = self.profile(profile_id)
        if not profile.spatial:
            return ObservationDesc(variant.vector_length, None, None)
        return ObservationDesc(
            vector_length=variant.vector_length,
            screen_shape=(self.screen.channels, self.screen.resolution, self.screen.resolution),
            minimap_shape=(self.minimap.channels, self.minimap.resolution,
                           self.minimap.resolution),
        )

    def action_desc(self, variant_id: str, profile_id: str) -> ActionDesc:
        variant = self.variant(variant_id)
        profile = self.profile(profile_id)
        return ActionDesc(
            kind=profile.actions,
            units=variant.friendly_count,
            flat_codes=variant.flat_action_codes if profile.actions == "flat" else None,
            directions=len(self.directions),
            enemy_slots=variant.enemy_count,
            masking=profile.masking,
        )
