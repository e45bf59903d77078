"""Measure raw stepping throughput, single instance and parallel workers.

Steps random legal structured actions as fast as possible and reports
agent-steps per second.  Spatial rendering is the dominant cost, so the
benchmark runs both with and without it.

    python demos/throughput.py --duration 2.0
"""

from __future__ import annotations

import argparse

from twobridge.baselines import bench_throughput
from twobridge.env import EnvConfig


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--variant", default="V2_Base")
    parser.add_argument("--duration", type=float, default=2.0, help="seconds per measurement")
    parser.add_argument("--instances", type=int, default=4, help="parallel worker processes")
    args = parser.parse_args()

    for spatial, label in ((False, "vector only"), (True, "with spatial planes")):
        config = EnvConfig(variant=args.variant, profile="exp2", spatial=spatial)
        report = bench_throughput(config, duration_s=args.duration, instances=args.instances)
        print(f"{label:20s} single {report.single_steps_per_sec:10,.0f} steps/s"
              + (f"   {args.instances} workers {report.parallel_steps_per_sec:10,.0f} steps/s"
                 if report.parallel_steps_per_sec else ""))


if __name__ == "__main__":
    main()
