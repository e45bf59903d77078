"""Terminal-outcome distributions for the scripted agents across variants.

Reproduces the evaluation-harness view: N seeded episodes per (agent,
variant) cell, tabulating how episodes end.  Expect idle to always time
out, beacon-greedy to dominate Navigate layouts, and focus-fire to win
the small-opposition V1 fights.

    python demos/baseline_table.py --episodes 50
    python demos/baseline_table.py --agents focus-fire --variants V1_Base V2_Base V3_Base
"""

from __future__ import annotations

import argparse
from pathlib import Path

from twobridge.baselines import AGENT_NAMES, format_table, run_episodes, write_csv
from twobridge.env import EnvConfig
from twobridge.spawn import variant_catalog

ALL_VARIANTS = [v.id for v in variant_catalog()]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--agents", nargs="+", default=list(AGENT_NAMES), choices=AGENT_NAMES)
    parser.add_argument("--variants", nargs="+", default=["V1_Base", "V2_Navigate", "V3_Combat"],
                        choices=ALL_VARIANTS)
    parser.add_argument("--profile", default="exp3")
    parser.add_argument("--episodes", type=int, default=25)
    parser.add_argument("--seed-start", type=int, default=0)
    parser.add_argument("--csv", type=Path, default=None, help="also write rows to this file")
    args = parser.parse_args()

    rows = []
    for agent in args.agents:
        for variant in args.variants:
            config = EnvConfig(variant=variant, profile=args.profile)
            rows.append(run_episodes(agent, config, episodes=args.episodes,
                                     seed_start=args.seed_start))
            d = rows[-1]
            print(f"{agent:13s} {variant:12s} done "
                  f"({d.mean_steps:5.1f} steps avg, return {d.mean_reward:+7.2f})")

    print()
    print(format_table(rows))
    if args.csv is not None:
        write_csv(rows, args.csv)
        print(f"\nwrote {args.csv}")


if __name__ == "__main__":
    main()
