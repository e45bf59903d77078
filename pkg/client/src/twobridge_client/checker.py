"""Environment-API conformance checker.

Validates one (variant, profile) configuration end to end against the
server-reported spec: observation shapes/dtypes/ranges, mask availability
per profile, reward/breakdown consistency, terminated-vs-truncated
semantics, reset determinism, and rejection of illegal actions.  Every
violation raises ConformanceFailure with the offending detail.
"""

from __future__ import annotations

import numpy as np

from .errors import ActionRejected, ClientError, ServerError
from .sampling import random_legal_action
from .spec import ActionDesc, ObservationDesc
from .wire import structured_action

_TERMINATING = ("navigation_victory", "combat_victory", "combat_loss", "tie")


class ConformanceFailure(ClientError):
    """The environment broke the API contract."""


def _need(condition: bool, detail: str) -> None:
    if not condition:
        raise ConformanceFailure(detail)


def _check_observation(obs: dict, desc: ObservationDesc) -> None:
    _need(isinstance(obs, dict), f"observation must be a dict, got {type(obs).__name__}")
    vector = obs.get("vector")
    _need(isinstance(vector, np.ndarray), "observation lacks a 'vector' array")
    _need(vector.dtype == np.float64, f"vector dtype {vector.dtype} is not float64")
    _need(vector.shape == (desc.vector_length,),
          f"vector shape {vector.shape} != ({desc.vector_length},)")
    _need(bool(np.isfinite(vector).all()), "vector contains non-finite values")
    if desc.screen_shape is None:
        _need(set(obs) == {"vector"}, f"unexpected observation keys {sorted(obs)}")
        return
    _need(set(obs) == {"vector", "screen", "minimap"},
          f"observation keys {sorted(obs)} for a spatial profile")
    for name, shape in (("screen", desc.screen_shape), ("minimap", desc.minimap_shape)):
        planes = obs[name]
        _need(isinstance(planes, np.ndarray) and planes.dtype == np.float32,
              f"{name} must be a float32 array")
        _need(planes.shape == shape, f"{name} shape {planes.shape} != {shape}")
        _need(bool((planes >= 0.0).all() and (planes <= 1.0).all()),
              f"{name} values outside [0, 1]")


def _check_mask(mask, desc: ActionDesc) -> None:
    if desc.masking is None:
        _need(mask is None, f"profile advertises no mask but got {type(mask).__name__}")
        return
    _need(isinstance(mask, dict), "mask must be an object")
    if desc.masking == "verb":
        _need(set(mask) == {"verb"}, f"verb-level mask has keys {sorted(mask)}")
    else:
        _need(set(mask) == {"verb", "who", "direction", "enemy"},
              f"branch-level mask has keys {sorted(mask)}")
    expected_lengths = {
        "verb": 3,
        "who": desc.units,
        "direction": desc.directions,
        "enemy": desc.enemy_slots + 1,  # trailing attack-nothing entry
    }
    for key, flags in mask.items():
        _need(
            isinstance(flags, list) and len(flags) == expected_lengths[key]
            and all(isinstance(b, bool) for b in flags),
            f"mask branch {key!r} is not {expected_lengths[key]} booleans",
        )
    _need(mask["verb"][0], "no-op must always stay legal")


def _check_info(info: dict, reward_fields: tuple[str, ...]) -> None:
    for key in ("step", "tick", "friendly_alive", "enemy_alive"):
        _need(isinstance(info.get(key), int), f"info[{key!r}] missing or not an integer")
    breakdown = info.get("reward_breakdown")
    _need(isinstance(breakdown, dict) and set(breakdown) == set(reward_fields),
          f"reward breakdown keys {sorted(breakdown or {})} != {sorted(reward_fields)}")
    for key, value in breakdown.items():
        _need(isinstance(value, (int, float)) and not isinstance(value, bool),
              f"breakdown field {key!r} is not a number")
    total = sum(breakdown[k] for k in reward_fields if k != "total")
    _need(breakdown["total"] == total, "breakdown total is not the exact sum of its parts")


def check_env(client, variant: str, profile: str, *, steps: int = 10,
              seed: int = 0, rng: np.random.Generator | None = None) -> dict:
    """Run the conformance suite for one configuration; returns a report."""
    rng = rng if rng is not None else np.random.default_rng(0)
    odesc = client.spec.observation_desc(variant, profile)
    adesc = client.spec.action_desc(variant, profile)
    options = {"variant": variant, "profile": profile}

    obs, info = client.reset(seed=seed, options=options)
    _check_observation(obs, odesc)
    _check_mask(info["mask"], adesc)
    _check_info(info, client.spec.reward_fields)
    _need(info["step"] == 0 and info["tick"] == 0, "reset info must start at step/tick 0")
    _need(info["outcome"] is None, "reset must not carry an outcome")
    _need(info.get("seed") == seed, "reset info does not echo the requested seed")
    _need(set(info.get("spawn", {})) == {"p1_region", "p2_region", "beacon_region"},
          "reset info lacks the spawn assignment")
    _need(info["reward_breakdown"]["total"] == 0.0, "reset reward must be zero")

    # same seed, same first observation, bit for bit
    obs2, _ = client.reset(seed=seed, options=options)
    _need(obs2["vector"].tobytes() == obs["vector"].tobytes(),
          "reset with a fixed seed is not deterministic")

    # a structurally illegal action must be rejected without advancing
    illegal = (
        structured_action("move", list(range(adesc.units)), direction=17)
        if adesc.kind == "structured"
        else [adesc.flat_codes + 40] * adesc.units
    )
    try:
        client.step(illegal)
        raise ConformanceFailure("illegal action was accepted")
    except ActionRejected:
        pass
    _, info = client.reset(seed=seed, options=options)

    prev_step, prev_tick = 0, 0
    ended = False
    outcome = None
    for _ in range(steps):
        mask = info["mask"]
        obs, reward, terminated, truncated, info = client.step(
            random_legal_action(adesc, mask, rng)
        )
        _check_observation(obs, odesc)
        _check_mask(info["mask"], adesc)
        _check_info(info, client.spec.reward_fields)
        _need(isinstance(reward, float), "reward is not a float")
        _need(isinstance(terminated, bool) and isinstance(truncated, bool),
              "terminated/truncated are not booleans")
        _need(not (terminated and truncated), "terminated and truncated are both set")
        _need(reward == info["reward_breakdown"]["total"],
              "reward does not equal the breakdown total")
        _need(info["step"] == prev_step + 1, "info step counter skipped")
        _need(info["tick"] > prev_tick, "info tick did not advance")
        prev_step, prev_tick = info["step"], info["tick"]
        outcome = info["outcome"]
        if terminated:
            _need(outcome in _TERMINATING, f"terminated with outcome {outcome!r}")
        elif truncated:
            _need(outcome == "timeout_loss", f"truncated with outcome {outcome!r}")
        else:
            _need(outcome is None, f"running episode carries outcome {outcome!r}")
        if terminated or truncated:
            ended = True
            break

    if ended:
        try:
            client.step(random_legal_action(adesc, info["mask"], rng))
            raise ConformanceFailure("stepping a finished episode was accepted")
        except ServerError as e:
            _need(e.code == "lifecycle", f"finished-episode step raised {e.code!r}")

    return {"variant": variant, "profile": profile, "steps": prev_step,
            "ended": ended, "outcome": outcome}
