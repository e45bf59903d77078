"""Release checks for the wire boundary: the environment-API checker must
pass for every (variant, profile) pair the server offers, and the first
observation at seed 0 must match frozen goldens byte for byte.

Regenerate data/goldens_seed0.json with data/regen_goldens.py after any
intentional observation change.
"""

from __future__ import annotations

import base64
import hashlib
import json
from pathlib import Path

import numpy as np
import pytest

from twobridge_client import check_env

GOLDENS = json.loads((Path(__file__).parent / "data" / "goldens_seed0.json").read_text())

VARIANTS = tuple(f"V{n}_{layout}" for n in (1, 2, 3)
                 for layout in ("Base", "Combat", "Navigate"))
PROFILES = ("pilot-nsf", "pilot-sf", "exp2", "exp3")
COMBOS = tuple((v, p) for v in VARIANTS for p in PROFILES)


def _digest(buf: bytes) -> str:
    return hashlib.blake2b(buf, digest_size=16).hexdigest()


def _wire_bytes(planes: np.ndarray) -> bytes:
    # invert the client's /255 decode; exact because 255 * float32(k/255)
    # stays within 0.5 of k for every byte value k
    return np.rint(planes.astype(np.float64) * 255.0).astype(np.uint8).tobytes()


def test_catalog_is_the_full_grid(client):
    assert len(COMBOS) == 36
    assert set(client.spec.variants) == set(VARIANTS)
    assert set(client.spec.profiles) == set(PROFILES)
    assert set(GOLDENS) == {f"{v}/{p}" for v, p in COMBOS}


@pytest.mark.parametrize(("variant", "profile"), COMBOS,
                         ids=[f"{v}-{p}" for v, p in COMBOS])
def test_env_api_conformance(client, variant, profile):
    report = check_env(client, variant, profile, steps=10, seed=0)
    assert (report["variant"], report["profile"]) == (variant, profile)
    assert report["steps"] >= 1
    if not report["ended"]:
        assert report["outcome"] is None


@pytest.mark.parametrize(("variant", "profile"), COMBOS,
                         ids=[f"{v}-{p}" for v, p in COMBOS])
def test_first_observation_matches_goldens(client, variant, profile):
    golden = GOLDENS[f"{variant}/{profile}"]
    obs, info = client.reset(seed=0, options={"variant": variant, "profile": profile})
    assert info["seed"] == 0
    assert [float(v) for v in obs["vector"]] == golden["vector"]
    assert _digest(obs["vector"].tobytes()) == golden["vector_digest"]
    if "screen" in obs:
        assert _digest(_wire_bytes(obs["screen"])) == golden["screen_digest"]
        assert _digest(_wire_bytes(obs["minimap"])) == golden["minimap_digest"]
    else:
        assert "screen_digest" not in golden


def test_full_plane_payloads_match(client):
    golden = GOLDENS["V1_Base/exp2"]
    obs, _ = client.reset(seed=0, options={"variant": "V1_Base", "profile": "exp2"})
    assert base64.b64encode(_wire_bytes(obs["screen"])).decode() == golden["screen_b64"]
    assert base64.b64encode(_wire_bytes(obs["minimap"])).decode() == golden["minimap_b64"]
