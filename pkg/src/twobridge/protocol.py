"""Wire codec: newline-delimited JSON messages over stdio or TCP.

Every message is one JSON object per line: {"kind", "id", "payload"}.
Requests (hello, reset, step, close) each get exactly one response (spec,
result, error, close) carrying the same id.  Spatial planes travel as
base64 uint8, one byte per pixel scaled to 0..255, C-order (channel, row,
column).  Numbers use shortest round-trip JSON floats, so vector and
reward values survive the wire exactly.
"""

from __future__ import annotations

import base64
import json
from typing import Any

import numpy as np

from .actions import StructuredAction, Verb
from .engine import OUTCOME_LABELS
from .errors import ProtocolError
from .obs import (
    MINIMAP_CHANNEL_NAMES,
    MINIMAP_CHANNELS,
    SCREEN_CHANNEL_NAMES,
    SCREEN_CHANNELS,
    SCREEN_EXTENT,
    SCREEN_RESOLUTION,
    vector_length,
)
from .spawn import catalog_payload
from .world import DIRECTIONS, MAP_SIZE

PROTOCOL_VERSION = 1

REQUEST_KINDS = ("hello", "reset", "step", "close")
RESPONSE_KINDS = ("spec", "result", "error", "close")

_VERB_NAMES = {Verb.NOOP: "noop", Verb.MOVE: "move", Verb.ATTACK: "attack"}
_VERB_CODES = {v: k for k, v in _VERB_NAMES.items()}

REWARD_FIELDS = ("nav", "combat_dist", "combat_hp", "combat_events", "terminal", "total")


def encode_message(kind: str, msg_id: int, payload: dict) -> str:
    return json.dumps({"kind": kind, "id": msg_id, "payload": payload})


def parse_message(line: str) -> tuple[str, int, dict]:
    """Parse one wire line; raises ProtocolError on any malformation."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise ProtocolError(f"not valid JSON: {e}") from None
    if not isinstance(obj, dict):
        raise ProtocolError("message must be a JSON object")
    kind = obj.get("kind")
    if not isinstance(kind, str):
        raise ProtocolError("missing or non-string 'kind'")
    msg_id = obj.get("id")
    if not isinstance(msg_id, int) or isinstance(msg_id, bool):
        raise ProtocolError("missing or non-integer 'id'")
    payload = obj.get("payload", {})
    if not isinstance(payload, dict):
        raise ProtocolError("'payload' must be an object")
    return kind, msg_id, payload


# -- actions ---------------------------------------------------------------


def action_to_wire(action: Any, structured: bool) -> dict:
    if not structured:
        return {"codes": [int(c) for c in action]}
    if not isinstance(action, StructuredAction):
        action = StructuredAction(*action)
    return {
        "verb": _VERB_NAMES[Verb(action.verb)],
        "who": [bool(action.who >> s & 1) for s in range(5)],
        "direction": None if action.direction is None else int(action.direction),
        "enemy": None if action.enemy_idx is None else int(action.enemy_idx),
    }


def action_from_wire(payload: Any, structured: bool):
    """Inverse of action_to_wire; raises ProtocolError on malformed payloads.
    Semantic legality is not checked here (the decoder does that)."""
    if not isinstance(payload, dict):
        raise ProtocolError("action must be an object")
    if not structured:
        codes = payload.get("codes")
        if not isinstance(codes, list) or not all(
            isinstance(c, int) and not isinstance(c, bool) for c in codes
        ):
            raise ProtocolError("flat action needs integer 'codes'")
        return list(codes)
    verb = payload.get("verb")
    if verb not in _VERB_CODES:
        raise ProtocolError(f"unknown verb {verb!r}")
    who = payload.get("who", [])
    if not isinstance(who, list) or len(who) > 5 or not all(
        isinstance(b, bool) for b in who
    ):
        raise ProtocolError("'who' must be a list of at most 5 booleans")
    bits = 0
    for s, b in enumerate(who):
        if b:
            bits |= 1 << s
    direction = payload.get("direction")
    if direction is not None and (isinstance(direction, bool) or not isinstance(direction, int)):
        raise ProtocolError("'direction' must be an integer or null")
    enemy = payload.get("enemy")
    if enemy is not None and (isinstance(enemy, bool) or not isinstance(enemy, int)):
        raise ProtocolError("'enemy' must be an integer or null")
    return StructuredAction(
        verb=int(_VERB_CODES[verb]), who=bits, direction=direction, enemy_idx=enemy
    )


# -- observations ----------------------------------------------------------


def plane_to_payload(planes: np.ndarray) -> dict:
    """float32 planes in [0, 1] -> base64 uint8 scaled to 0..255."""
    scaled = np.rint(np.asarray(planes, dtype=np.float64) * 255.0).astype(np.uint8)
    return {
        "shape": list(planes.shape),
        "dtype": "uint8",
        "encoding": "base64",
        "data": base64.b64encode(scaled.tobytes()).decode("ascii"),
    }


def payload_to_planes(payload: Any) -> np.ndarray:
    """Inverse transport decode: uint8 planes scaled back to float32 [0, 1]."""
    if (
        not isinstance(payload, dict)
        or payload.get("dtype") != "uint8"
        or payload.get("encoding") != "base64"
        or not isinstance(payload.get("shape"), list)
        or not isinstance(payload.get("data"), str)
    ):
        raise ProtocolError("malformed plane payload")
    raw = np.frombuffer(base64.b64decode(payload["data"]), dtype=np.uint8)
    planes = raw.reshape(payload["shape"]).astype(np.float32) / 255.0
    return planes


def payload_to_plane_bytes(payload: Any) -> np.ndarray:
    """Transport decode keeping the raw uint8 values."""
    if not isinstance(payload, dict) or payload.get("dtype") != "uint8":
        raise ProtocolError("malformed plane payload")
    raw = np.frombuffer(base64.b64decode(payload["data"]), dtype=np.uint8)
    return raw.reshape(payload["shape"])


def mask_to_payload(mask: Any) -> Any:
    if mask is None:
        return None
    if isinstance(mask, np.ndarray):  # verb-level
        return {"verb": [bool(b) for b in mask]}
    return {
        "verb": [bool(b) for b in mask.verb],
        "who": [bool(b) for b in mask.who],
        "direction": [bool(b) for b in mask.direction],
        "enemy": [bool(b) for b in mask.enemy],
    }


def step_result_payload(result: Any) -> dict:
    """Serialize a StepResult (duck-typed to avoid an env dependency)."""
    obs: dict[str, Any] = {"vector": [float(v) for v in result.observation.vector]}
    if result.observation.spatial is not None:
        obs["screen"] = plane_to_payload(result.observation.spatial.screen)
        obs["minimap"] = plane_to_payload(result.observation.spatial.minimap)
    return {
        "observation": obs,
        "mask": mask_to_payload(result.mask),
        "reward": result.reward.as_dict(),
        "done": bool(result.done),
        "outcome": None if result.outcome is None else result.outcome.label,
        "info": result.info,
    }


# -- handshake -------------------------------------------------------------


def spec_payload() -> dict:
    """Everything a client needs to size spaces and validate semantics."""
    variants = []
    for v in catalog_payload():
        v = dict(v)
        v["vector_length"] = vector_length(v["enemy_count"])
        v["flat_action_codes"] = 9 + v["enemy_count"]
        variants.append(v)
    profiles = [
        {
            "id": "pilot-nsf",
            "actions": "flat",
            "masking": None,
            "spatial": False,
            "reward": "pilot",
            "camera": "free",
        },
        {
            "id": "pilot-sf",
            "actions": "flat",
            "masking": None,
            "spatial": True,
            "reward": "pilot",
            "camera": "free",
        },
        {
            "id": "exp2",
            "actions": "structured",
            "masking": "verb",
            "spatial": True,
            "reward": "shaped",
            "camera": "free",
        },
        {
            "id": "exp3",
            "actions": "structured",
            "masking": "branch",
            "spatial": True,
            "reward": "shaped",
            "camera": "locked",
        },
    ]
    return {
        "protocol": PROTOCOL_VERSION,
        "suite": "two-bridge",
        "map_size": MAP_SIZE,
        "variants": variants,
        "profiles": profiles,
        "directions": list(DIRECTIONS),
        "outcomes": list(OUTCOME_LABELS),
        "reward_fields": list(REWARD_FIELDS),
        "screen": {
            "channels": SCREEN_CHANNELS,
            "resolution": SCREEN_RESOLUTION,
            "extent": SCREEN_EXTENT,
            "channel_names": list(SCREEN_CHANNEL_NAMES),
        },
        "minimap": {
            "channels": MINIMAP_CHANNELS,
            "resolution": MAP_SIZE,
            "channel_names": list(MINIMAP_CHANNEL_NAMES),
        },
    }
