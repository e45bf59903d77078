"""Wiring sketch: a maskable policy trainer on the suite via the wire client.

Documentation only.  Needs `pip install gymnasium sb3-contrib`; the server
side just needs `python -m twobridge.server` importable.  The exp3 branch
masks flatten into one MultiDiscrete mask vector.
"""

import gymnasium as gym
import numpy as np
from sb3_contrib import MaskablePPO
from sb3_contrib.common.wrappers import ActionMasker

from twobridge_client import TwoBridgeClient, structured_action

VARIANT = "V1_Combat"


class MaskableTwoBridge(gym.Env):
    """Branches flattened to MultiDiscrete([3, 2 x 5 units, 8, N_E + 1])."""

    def __init__(self):
        self.client = TwoBridgeClient.launch(variant=VARIANT, profile="exp3")
        self.desc = self.client.spec.action_desc(VARIANT, "exp3")
        n = self.client.spec.variant(VARIANT).vector_length
        self.observation_space = gym.spaces.Box(-np.inf, np.inf, (n,), np.float64)
        self.action_space = gym.spaces.MultiDiscrete(
            [3] + [2] * self.desc.units + [self.desc.directions, self.desc.enemy_slots + 1])

    def action_masks(self):
        m = self._mask  # excluding a unit is always legal; including needs it alive
        who = [b for ok in m["who"] for b in (True, ok)]
        return np.array(m["verb"] + who + m["direction"] + m["enemy"])

    def reset(self, *, seed=None, options=None):
        obs, info = self.client.reset(seed=seed)
        self._mask = info["mask"]
        return obs["vector"], info

    def step(self, action):
        verb, *flags, direction, enemy = (int(a) for a in action)
        who = [slot for slot, flag in enumerate(flags) if flag]
        if verb == 0 or not who:  # per-branch masks cannot demand a nonempty selection
            wire = structured_action("noop", [])
        elif verb == 1:
            wire = structured_action("move", who, direction=direction)
        else:
            wire = structured_action(
                "attack", who, enemy=None if enemy == self.desc.enemy_slots else enemy)
        obs, reward, terminated, truncated, info = self.client.step(wire)
        self._mask = info["mask"]
        return obs["vector"], reward, terminated, truncated, info


env = ActionMasker(MaskableTwoBridge(), lambda e: e.action_masks())
MaskablePPO("MlpPolicy", env, verbose=1).learn(total_timesteps=2_000_000)
