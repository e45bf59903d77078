"""Live client behavior against a subprocess server: handshake, the
reset/step API, termination semantics, and error surfaces."""

from __future__ import annotations

import socket
import subprocess
import sys
import time

import numpy as np
import pytest

from twobridge_client import (
    ActionRejected,
    ClientError,
    ConnectError,
    ServerError,
    TwoBridgeClient,
    structured_action,
)

IDLE = structured_action("noop", [])


# -- handshake and spec ----------------------------------------------------


def test_handshake_spec(client):
    spec = client.spec
    assert spec.protocol == 1 and spec.suite == "two-bridge" and spec.map_size == 64
    assert len(spec.variants) == 9 and len(spec.profiles) == 4
    assert spec.variant("V3_Combat").enemy_count == 8
    assert spec.variant("V3_Combat").vector_length == 61
    assert spec.profile("exp3").masking == "branch"
    assert spec.profile("pilot-nsf").spatial is False
    assert spec.outcomes == ("navigation_victory", "combat_victory", "combat_loss",
                             "tie", "timeout_loss")

    odesc = spec.observation_desc("V2_Base", "exp2")
    assert odesc.vector_length == 49
    assert odesc.screen_shape == (17, 64, 64) and odesc.minimap_shape == (7, 64, 64)
    assert spec.observation_desc("V2_Base", "pilot-nsf").screen_shape is None

    adesc = spec.action_desc("V1_Base", "pilot-sf")
    assert (adesc.kind, adesc.flat_codes, adesc.enemy_slots) == ("flat", 12, 3)
    assert spec.action_desc("V1_Base", "exp2").flat_codes is None

    with pytest.raises(KeyError):
        spec.variant("V9_Base")
    with pytest.raises(KeyError):
        spec.observation_desc("V1_Base", "exp9")


def test_launch_failure_is_descriptive():
    with pytest.raises(ConnectError):
        TwoBridgeClient.launch(command=["/nonexistent/server-binary"])


def test_connect_failure_is_descriptive():
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        free_port = probe.getsockname()[1]
    with pytest.raises(ConnectError):
        TwoBridgeClient.connect("127.0.0.1", free_port, timeout=2.0)


# -- reset/step semantics --------------------------------------------------


def test_reset_and_step_shapes(client):
    obs, info = client.reset(seed=3, options={"variant": "V2_Combat", "profile": "exp3"})
    assert set(obs) == {"vector", "screen", "minimap"}
    assert obs["vector"].shape == (49,) and obs["vector"].dtype == np.float64
    assert obs["screen"].shape == (17, 64, 64) and obs["screen"].dtype == np.float32
    assert info["seed"] == 3 and info["outcome"] is None
    assert set(info["mask"]) == {"verb", "who", "direction", "enemy"}

    obs, reward, terminated, truncated, info = client.step(IDLE)
    assert isinstance(reward, float) and reward == info["reward_breakdown"]["total"]
    assert terminated is False and truncated is False
    assert info["step"] == 1 and info["tick"] == 8


def test_vector_only_profile(client):
    obs, info = client.reset(seed=0, options={"variant": "V1_Base", "profile": "pilot-nsf"})
    assert set(obs) == {"vector"}
    assert obs["vector"].shape == (41,)
    assert info["mask"] is None
    obs, reward, *_ , info = client.step([1, 2, 3, 0, 4])
    assert set(obs) == {"vector"}
    assert reward == info["reward_breakdown"]["total"]


def test_same_seed_same_bytes(client):
    first, _ = client.reset(seed=77, options={"variant": "V3_Navigate", "profile": "exp2"})
    second, _ = client.reset(seed=77, options={"variant": "V3_Navigate", "profile": "exp2"})
    assert first["vector"].tobytes() == second["vector"].tobytes()
    assert first["screen"].tobytes() == second["screen"].tobytes()


def test_timeout_is_truncation(client):
    _, info = client.reset(
        seed=0, options={"variant": "V1_Base", "profile": "exp3", "tick_limit": 16}
    )
    _, reward, terminated, truncated, info = client.step(IDLE)
    assert (terminated, truncated) == (False, False)
    _, reward, terminated, truncated, info = client.step(IDLE)
    assert (terminated, truncated) == (False, True)
    assert info["outcome"] == "timeout_loss"
    assert info["reward_breakdown"]["terminal"] == -15.0
    assert reward == -15.0


def _compass(dx: float, dy: float) -> int:
    """Direction code toward (dx, dy); y grows southward on the map."""
    east, west = dx > 0.75, dx < -0.75
    south, north = dy > 0.75, dy < -0.75
    if north and east:
        return 4
    if north and west:
        return 5
    if south and east:
        return 6
    if south and west:
        return 7
    if north:
        return 0
    if south:
        return 1
    if west:
        return 2
    return 3


def test_navigation_win_is_termination_with_full_bonus(client):
    # Navigate layouts spawn friendlies and beacon on the same side, so
    # greedy compass steering toward the beacon reaches it unobstructed.
    obs, info = client.reset(seed=0, options={"variant": "V2_Navigate", "profile": "exp2"})
    beacon_at = 25 + 4 * client.spec.variant("V2_Navigate").enemy_count
    terminated = truncated = False
    for _ in range(120):
        v = obs["vector"]
        alive = [f for f in range(5) if v[5 * f + 2] > 0]
        lead = min(alive, key=lambda f: v[5 * f + 4])
        dx = (v[beacon_at] - v[5 * lead]) * 64
        dy = (v[beacon_at + 1] - v[5 * lead + 1]) * 64
        action = structured_action("move", [0, 1, 2, 3, 4], direction=_compass(dx, dy))
        obs, reward, terminated, truncated, info = client.step(action)
        if terminated or truncated:
            break
    assert terminated is True and truncated is False
    assert info["outcome"] == "navigation_victory"
    assert info["reward_breakdown"]["terminal"] == 25.0
    assert reward == info["reward_breakdown"]["total"]


def test_combat_end_is_termination(client):
    # mask-guided focus fire: 5 friendlies into the lowest live enemy slot
    _, info = client.reset(seed=1, options={"variant": "V1_Combat", "profile": "exp3"})
    terminated = truncated = False
    for _ in range(600):
        mask = info["mask"]
        if mask["verb"][2]:
            target = next(t for t, ok in enumerate(mask["enemy"][:-1]) if ok)
            action = structured_action("attack", [s for s, ok in enumerate(mask["who"]) if ok],
                                       enemy=target)
        else:
            action = IDLE
        _, reward, terminated, truncated, info = client.step(action)
        if terminated or truncated:
            break
    assert terminated is True and truncated is False
    assert info["outcome"] in ("combat_victory", "combat_loss")
    assert info["reward_breakdown"]["terminal"] in (10.0, -10.0)


def test_rejected_action_leaves_session_usable(client):
    _, info = client.reset(seed=5, options={"variant": "V2_Base", "profile": "exp3"})
    with pytest.raises(ActionRejected) as err:
        client.step(structured_action("move", [0, 1, 2, 3, 4], direction=17))
    assert "direction" in str(err.value)
    _, _, _, _, info = client.step(IDLE)
    assert info["step"] == 1  # the rejected action did not advance anything


def test_step_before_reset_is_lifecycle_error(launch):
    fresh = launch()
    with pytest.raises(ServerError) as err:
        fresh.step(IDLE)
    assert err.value.code == "lifecycle"


def test_sequential_seed_policy(launch):
    c = launch(variant="V1_Base", profile="pilot-nsf", seed_mode="sequential", base_seed=40)
    assert c.reset()[1]["seed"] == 40
    assert c.reset()[1]["seed"] == 41


def test_closed_client_refuses_requests(launch):
    c = launch()
    c.close()
    c.close()  # idempotent
    with pytest.raises(ClientError):
        c.reset(seed=0)


# -- TCP transport ---------------------------------------------------------


def test_tcp_round_trip():
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    proc = subprocess.Popen(
        [sys.executable, "-m", "twobridge.server", "--transport", "tcp", "--port", str(port)]
    )
    try:
        client = None
        for _ in range(120):  # wait out the server's import time
            try:
                client = TwoBridgeClient.connect("127.0.0.1", port,
                                                 variant="V1_Navigate", profile="exp2")
                break
            except ConnectError:
                time.sleep(0.25)
        assert client is not None, "server never came up"
        with client:
            obs, info = client.reset(seed=9)
            assert obs["vector"].shape == (41,) and info["seed"] == 9
            _, reward, _, _, info = client.step(IDLE)
            assert info["tick"] == 8 and reward == info["reward_breakdown"]["total"]
    finally:
        proc.terminate()
        proc.wait(timeout=10)
