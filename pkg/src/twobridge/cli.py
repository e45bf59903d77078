"""Command line entry: serve, run, bench, list-variants."""

from __future__ import annotations

import argparse
import json

from .baselines import AGENT_NAMES, bench_throughput, format_table, run_episodes
from .env import PROFILES, EnvConfig
from .server import add_serve_args, serve_from_args
from .spawn import catalog_payload


def _add_env_args(p: argparse.ArgumentParser, default_profile: str = "exp3") -> None:
    p.add_argument("--variant", default="V2_Base", help="variant id, e.g. V2_Base")
    p.add_argument("--profile", default=default_profile, choices=PROFILES)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twobridge", description="Two-bridge micro-RTS benchmark suite"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the environment server")
    add_serve_args(p)

    p = sub.add_parser("run", help="sweep a scripted agent over seeds")
    _add_env_args(p)
    p.add_argument("--agent", choices=AGENT_NAMES, default="random")
    p.add_argument("-n", "--episodes", type=int, default=100)
    p.add_argument("--csv", default=None, help="write the distribution row to this file")

    p = sub.add_parser("bench", help="measure agent-steps per second")
    _add_env_args(p, default_profile="exp2")
    p.add_argument("--duration", type=float, default=2.0)
    p.add_argument("--instances", type=int, default=8)

    p = sub.add_parser("list-variants", help="print the variant catalog")
    p.add_argument("--json", action="store_true", help="machine-readable output")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "serve":
        serve_from_args(args)
        return 0

    if args.command == "run":
        config = EnvConfig(variant=args.variant, profile=args.profile, seed=args.seed)
        dist = run_episodes(
            args.agent, config, episodes=args.episodes, seed_start=args.seed, csv_path=args.csv
        )
        print(format_table([dist]))
        return 0

    if args.command == "bench":
        config = EnvConfig(variant=args.variant, profile=args.profile, spatial=False)
        report = bench_throughput(config, duration_s=args.duration, instances=args.instances)
        print(
            f"single instance: {report.single_steps_per_sec:,.0f} steps/s "
            f"({report.single_steps} steps in {report.duration_s:.1f}s)"
        )
        if report.parallel_instances > 1:
            print(
                f"{report.parallel_instances} instances: "
                f"{report.parallel_steps_per_sec:,.0f} steps/s aggregate"
            )
        return 0

    if args.command == "list-variants":
        catalog = catalog_payload()
        if args.json:
            print(json.dumps(catalog, indent=2))
        else:
            print(f"{'id':<14} {'friendly':>8} {'enemy':>6} {'layout':<10}")
            for v in catalog:
                print(
                    f"{v['id']:<14} {v['friendly_count']:>8} {v['enemy_count']:>6} {v['layout']:<10}"
                )
        return 0

    return 1


if __name__ == "__main__":
    raise SystemExit(main())
