"""Run one episode with a scripted agent and narrate it step by step.

Shows the basic loop: configure, reset, feed actions, read the reward
breakdown, stop on done.  Try different variants and agents, e.g.

    python demos/run_episode.py --variant V2_Navigate --agent beacon-greedy
    python demos/run_episode.py --variant V1_Base --agent focus-fire --seed 3
"""

from __future__ import annotations

import argparse

import numpy as np

from twobridge.baselines import AGENT_NAMES, make_agent
from twobridge.engine import summarize
from twobridge.env import EnvConfig, TwoBridgeEnv
from twobridge.spawn import variant_catalog


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--variant", default="V2_Navigate",
                        choices=[v.id for v in variant_catalog()])
    parser.add_argument("--profile", default="exp3",
                        choices=("pilot-nsf", "pilot-sf", "exp2", "exp3"))
    parser.add_argument("--agent", default="beacon-greedy", choices=AGENT_NAMES)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--every", type=int, default=5, help="print every Nth step")
    args = parser.parse_args()

    env = TwoBridgeEnv(EnvConfig(variant=args.variant, profile=args.profile,
                                 seed=args.seed, spatial=False))
    agent = make_agent(args.agent, env.structured)
    rng = np.random.Generator(np.random.PCG64(args.seed))

    result = env.reset()
    spawn = result.info["spawn"]
    print(f"{args.variant} / {args.profile} / seed {args.seed}")
    print(f"friendly spawn {spawn['p1_region']}, enemy spawn {spawn['p2_region']}, "
          f"beacon in {spawn['beacon_region']}")

    total = 0.0
    while not result.done:
        result = env.step(agent(env.world, result.mask, rng))
        total += result.reward.total
        if result.info["step"] % args.every == 0 or result.done:
            s = summarize(env.world)
            print(f"step {result.info['step']:3d}  tick {result.info['tick']:4d}  "
                  f"alive {s.friendly_alive}v{s.enemy_alive}  "
                  f"beacon dist {s.avg_beacon_dist:6.2f}  "
                  f"reward {result.reward.total:+7.3f}  "
                  f"(nav {result.reward.nav:+.3f}, events {result.reward.combat_events:+.1f})")

    print(f"\noutcome: {result.outcome.label}  after {result.info['step']} steps "
          f"({result.info['tick']} ticks, {result.info['tick'] / 16:.1f}s game time)")
    print(f"episode return: {total:+.3f} (terminal component {result.reward.terminal:+.1f})")


if __name__ == "__main__":
    main()
