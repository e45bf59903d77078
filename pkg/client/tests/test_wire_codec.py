"""Client-side codec: envelopes, action forms, plane decoding."""

from __future__ import annotations

import base64
import json

import numpy as np
import pytest

from twobridge_client import WireError, flat_action, structured_action
from twobridge_client.wire import (
    decode_plane_bytes,
    decode_planes,
    encode_request,
    parse_response,
)


def test_encode_request_shape():
    line = encode_request("step", 4, {"action": {"codes": [0]}})
    assert json.loads(line) == {"kind": "step", "id": 4, "payload": {"action": {"codes": [0]}}}
    assert json.loads(encode_request("hello", 1)) == {"kind": "hello", "id": 1, "payload": {}}


def test_parse_response_round_trip():
    assert parse_response('{"kind": "spec", "id": 3, "payload": {"a": 1}}') == ("spec", 3, {"a": 1})
    assert parse_response('{"kind": "close", "id": 9}') == ("close", 9, {})


@pytest.mark.parametrize(
    "line",
    [
        "garbage",
        "[]",
        '{"id": 1, "payload": {}}',
        '{"kind": 7, "id": 1}',
        '{"kind": "x"}',
        '{"kind": "x", "id": true}',
        '{"kind": "x", "id": 1, "payload": 3}',
    ],
)
def test_parse_response_rejects_malformed(line):
    with pytest.raises(WireError):
        parse_response(line)


def test_structured_action_from_slot_indices():
    assert structured_action("move", [0, 3], direction=2) == {
        "verb": "move",
        "who": [True, False, False, True, False],
        "direction": 2,
        "enemy": None,
    }


def test_structured_action_from_bool_flags():
    action = structured_action("attack", [True, True, False], enemy=1)
    assert action["who"] == [True, True, False, False, False]
    assert action["enemy"] == 1 and action["direction"] is None


def test_structured_action_noop_and_null_target():
    assert structured_action("noop", [])["who"] == [False] * 5
    assert structured_action("attack", [0], enemy=None)["enemy"] is None


@pytest.mark.parametrize(
    "kwargs",
    [
        {"verb": "charge", "who": [0]},
        {"verb": "move", "who": [5]},
        {"verb": "move", "who": [-1]},
        {"verb": "move", "who": [True] * 6},
    ],
)
def test_structured_action_rejects_bad_input(kwargs):
    with pytest.raises(ValueError):
        structured_action(**kwargs)


def test_flat_action_coerces_ints():
    assert flat_action(np.array([0, 1, 9, 3, 2])) == {"codes": [0, 1, 9, 3, 2]}


def _plane_payload(planes: np.ndarray) -> dict:
    return {
        "shape": list(planes.shape),
        "dtype": "uint8",
        "encoding": "base64",
        "data": base64.b64encode(planes.tobytes()).decode(),
    }


def test_decode_planes_round_trip():
    raw = np.arange(2 * 3 * 4, dtype=np.uint8).reshape(2, 3, 4)
    payload = _plane_payload(raw)
    assert np.array_equal(decode_plane_bytes(payload), raw)
    planes = decode_planes(payload)
    assert planes.dtype == np.float32
    assert np.array_equal(planes, raw.astype(np.float32) / 255.0)


@pytest.mark.parametrize(
    "mangle",
    [
        lambda p: p.pop("data"),
        lambda p: p.update(dtype="float32"),
        lambda p: p.update(encoding="hex"),
        lambda p: p.update(data="!!not-base64!!"),
        lambda p: p.update(shape=[99, 99]),
        lambda p: None or p.clear(),
    ],
)
def test_decode_planes_rejects_malformed(mangle):
    payload = _plane_payload(np.zeros((2, 2), dtype=np.uint8))
    mangle(payload)
    with pytest.raises(WireError):
        decode_planes(payload)
