"""Watch an episode as ASCII frames: terrain, units, and the beacon.

The map is drawn from the terrain grid at cell resolution; units overdraw
terrain (F = friendly, E = enemy, B = beacon, # = cliff).  Frames are
printed every few steps so a whole episode fits in a terminal scrollback.

    python demos/ascii_episode.py --variant V1_Base --agent beacon-greedy
"""

from __future__ import annotations

import argparse

import numpy as np

from twobridge.baselines import AGENT_NAMES, make_agent
from twobridge.env import EnvConfig, TwoBridgeEnv
from twobridge.spawn import variant_catalog


def frame(env: TwoBridgeEnv, shrink: int = 1) -> str:
    grid = env.world.grid
    rows = [["." if grid.passable[y, x] else "#" for x in range(grid.width)]
            for y in range(grid.height)]
    bx, by = env.world.beacon
    rows[int(by)][int(bx)] = "B"
    for u in env.world.units():
        if u.alive:
            rows[int(u.pos.y)][int(u.pos.x)] = "F" if u.team == "friendly" else "E"
    # halve vertically so a 64-row map fits a terminal; unit marks win
    out = []
    for y in range(0, grid.height, shrink):
        merged = rows[y]
        for yy in range(y + 1, min(y + shrink, grid.height)):
            merged = [b if b in "FEB" else a for a, b in zip(merged, rows[yy])]
        out.append("".join(merged))
    return "\n".join(out)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--variant", default="V1_Base",
                        choices=[v.id for v in variant_catalog()])
    parser.add_argument("--agent", default="beacon-greedy", choices=AGENT_NAMES)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--every", type=int, default=15, help="steps between frames")
    args = parser.parse_args()

    env = TwoBridgeEnv(EnvConfig(variant=args.variant, profile="exp3",
                                 seed=args.seed, spatial=False))
    agent = make_agent(args.agent, structured=True)
    rng = np.random.Generator(np.random.PCG64(args.seed))

    result = env.reset()
    print(f"tick {env.world.tick}")
    print(frame(env, shrink=2))
    while not result.done:
        result = env.step(agent(env.world, result.mask, rng))
        if result.info["step"] % args.every == 0 or result.done:
            print(f"\ntick {env.world.tick}  "
                  f"alive {result.info['friendly_alive']}v{result.info['enemy_alive']}")
            print(frame(env, shrink=2))
    print(f"\noutcome: {result.outcome.label}")


if __name__ == "__main__":
    main()
