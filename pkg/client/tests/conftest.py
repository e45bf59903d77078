"""Fixtures: launched server subprocesses with guaranteed cleanup."""

from __future__ import annotations

import pytest

from twobridge_client import TwoBridgeClient


@pytest.fixture(scope="module")
def client():
    """One subprocess server shared per module; tests reconfigure via reset."""
    c = TwoBridgeClient.launch()
    yield c
    c.close()


@pytest.fixture
def launch():
    """Factory for tests needing a fresh session or special flags."""
    made = []

    def _launch(**kwargs) -> TwoBridgeClient:
        c = TwoBridgeClient.launch(**kwargs)
        made.append(c)
        return c

    yield _launch
    for c in made:
        c.close()
