"""Episode recording and bit-exact re-verification.

A replay is JSONL: a header line (config, seed, spawn assignment, initial
state hash), then one record per agent step with the action, the reward
breakdown, the post-step state hash, and per-unit snapshots.  Verification
re-runs the episode from the recorded config and compares hashes exactly.
"""

from __future__ import annotations

import json
from typing import Any

from .engine import WorldState
from .errors import ReplayMismatchError
from .protocol import action_from_wire, action_to_wire
from .spawn import SpawnAssignment


def _unit_snapshots(world: WorldState) -> list[dict]:
    out = []
    for u in world.units():
        out.append(
            {
                "id": u.id,
                "team": u.team,
                "x": round(u.pos.x, 9),
                "y": round(u.pos.y, 9),
                "hp": u.hp,
                "cooldown": u.cooldown_remaining,
                "alive": u.alive,
            }
        )
    return out


class ReplayWriter:
    def __init__(self, path: str):
        self._f = open(path, "w")

    def header(self, config, assignment: SpawnAssignment, seed: int, world: WorldState) -> None:
        from .env import config_to_dict, state_hash_hex

        line = {
            "kind": "header",
            "config": config_to_dict(config),
            "seed": seed,
            "spawn": {
                "p1_region": assignment.p1_region,
                "p2_region": assignment.p2_region,
                "beacon_region": assignment.beacon_region,
                "friendly_positions": [[p.x, p.y] for p in assignment.friendly_positions],
                "enemy_positions": [[p.x, p.y] for p in assignment.enemy_positions],
                "beacon_position": [assignment.beacon_position.x, assignment.beacon_position.y],
            },
            "initial_hash": state_hash_hex(world),
        }
        self._f.write(json.dumps(line) + "\n")

    def record(self, step_idx: int, action: Any, env, result) -> None:
        from .env import state_hash_hex

        line = {
            "kind": "step",
            "step": step_idx,
            "action": action_to_wire(action, env.structured),
            "reward": result.reward.as_dict(),
            "state_hash": state_hash_hex(env.world),
            "outcome": None if result.outcome is None else result.outcome.label,
            "units": _unit_snapshots(env.world),
        }
        self._f.write(json.dumps(line) + "\n")

    def close(self) -> None:
        if not self._f.closed:
            self._f.close()


def load_replay(path: str) -> tuple[dict, list[dict]]:
    with open(path) as f:
        lines = [json.loads(line) for line in f if line.strip()]
    if not lines or lines[0].get("kind") != "header":
        raise ReplayMismatchError("replay file has no header line")
    return lines[0], lines[1:]


def verify_replay(path: str) -> dict:
    """Re-run a recorded episode and compare state hashes and rewards.

    Returns {'steps': n, 'outcome': label} on success; raises
    ReplayMismatchError on the first divergence.
    """
    from .env import TwoBridgeEnv, config_from_dict, state_hash_hex

    header, records = load_replay(path)
    env = TwoBridgeEnv(config_from_dict(header["config"]))
    env.reset(seed=header["seed"])
    if state_hash_hex(env.world) != header["initial_hash"]:
        raise ReplayMismatchError("initial state hash differs")
    outcome = None
    for rec in records:
        action = action_from_wire(rec["action"], env.structured)
        result = env.step(action)
        got = state_hash_hex(env.world)
        if got != rec["state_hash"]:
            raise ReplayMismatchError(
                f"state hash differs at step {rec['step']}: {got} != {rec['state_hash']}"
            )
        if result.reward.as_dict() != rec["reward"]:
            raise ReplayMismatchError(f"reward differs at step {rec['step']}")
        outcome = result.outcome
    return {
        "steps": len(records),
        "outcome": None if outcome is None else outcome.label,
    }
