"""Client half of the wire codec (see PROTOCOL.md in the server package).

One JSON object per line, {"kind", "id", "payload"}.  Spatial planes
arrive as base64 uint8 scaled to 0..255; vectors and rewards as plain
JSON numbers, which round-trip IEEE doubles exactly.
"""

from __future__ import annotations

import base64
import json
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import WireError

VERBS = ("noop", "move", "attack")
N_UNITS = 5


def encode_request(kind: str, msg_id: int, payload: dict | None = None) -> str:
    return json.dumps({"kind": kind, "id": msg_id, "payload": payload or {}})


def parse_response(line: str) -> tuple[str, int, dict]:
    """Validate the envelope of one received line."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise WireError(f"unparseable response line: {e}") from None
    if not isinstance(obj, dict):
        raise WireError("response is not a JSON object")
    kind = obj.get("kind")
    msg_id = obj.get("id")
    payload = obj.get("payload", {})
    if not isinstance(kind, str) or not isinstance(msg_id, int) or isinstance(msg_id, bool):
        raise WireError("response envelope missing kind or id")
    if not isinstance(payload, dict):
        raise WireError("response payload is not an object")
    return kind, msg_id, payload


def structured_action(
    verb: str,
    who: Iterable[int] | Sequence[bool],
    direction: int | None = None,
    enemy: int | None = None,
) -> dict:
    """Build the wire form of a structured action.

    `who` is either a boolean list (one per unit slot) or an iterable of
    selected slot indices.
    """
    if verb not in VERBS:
        raise ValueError(f"verb must be one of {VERBS}, got {verb!r}")
    who = list(who)
    if who and all(isinstance(b, bool) for b in who):
        if len(who) > N_UNITS:
            raise ValueError(f"at most {N_UNITS} selection flags")
        flags = who + [False] * (N_UNITS - len(who))
    else:
        flags = [False] * N_UNITS
        for s in who:
            if not 0 <= int(s) < N_UNITS:
                raise ValueError(f"unit slot {s} out of range")
            flags[int(s)] = True
    return {
        "verb": verb,
        "who": flags,
        "direction": None if direction is None else int(direction),
        "enemy": None if enemy is None else int(enemy),
    }


def flat_action(codes: Iterable[int]) -> dict:
    return {"codes": [int(c) for c in codes]}


def decode_planes(payload: Any) -> np.ndarray:
    """Plane payload -> float32 array in [0, 1] (uint8 / 255)."""
    return decode_plane_bytes(payload).astype(np.float32) / 255.0


def decode_plane_bytes(payload: Any) -> np.ndarray:
    """Plane payload -> raw uint8 array, for byte-exact comparisons."""
    if (
        not isinstance(payload, dict)
        or payload.get("dtype") != "uint8"
        or payload.get("encoding") != "base64"
        or not isinstance(payload.get("shape"), list)
        or not isinstance(payload.get("data"), str)
    ):
        raise WireError("malformed plane payload")
    try:
        raw = np.frombuffer(base64.b64decode(payload["data"], validate=True), dtype=np.uint8)
        return raw.reshape(payload["shape"])
    except (ValueError, TypeError) as e:
        raise WireError(f"bad plane data: {e}") from None
