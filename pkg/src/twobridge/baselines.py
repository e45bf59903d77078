"""Scripted reference agents, outcome sweeps, and throughput benchmarks.

Agents are callables (world, mask, rng) -> action.  The structured agents
target the branch-masked interface, so anything they emit decodes under
both verb-level and branch-level masking.
"""

from __future__ import annotations

import csv
import multiprocessing
import time
from dataclasses import dataclass, replace

import numpy as np

from .actions import (
    ActionMask,
    StructuredAction,
    Verb,
    _feasible_directions,
    flat_action_count,
    who_bits,
)
from .engine import WorldState
from .env import EnvConfig, TwoBridgeEnv
from .errors import ConfigError
from .world import find_path
from . import _kernels

AGENT_NAMES = ("idle", "random", "beacon-greedy", "focus-fire")

IDLE_ACTION = StructuredAction(Verb.NOOP)


def agent_idle(world: WorldState) -> StructuredAction:
    return IDLE_ACTION


def agent_random_masked(
    world: WorldState, mask: ActionMask | None, rng: np.random.Generator
) -> StructuredAction:
    """Uniform sample over the branch-legal joint action set.

    Branch sizes: NoOp contributes 1, Move (2^a - 1) * legal directions,
    Attack (2^a - 1) * legal targets (null included), with a the number of
    selectable slots.  An ActionMask is sampled as given; under verb-level
    masking (or none) the branches are recovered from the world, so the
    result decodes under any masking regime.
    """
    if isinstance(mask, ActionMask):
        slots = [s for s, ok in enumerate(mask.who.tolist()) if ok]
        dirs = [d for d, ok in enumerate(mask.direction.tolist()) if ok]
        em = mask.enemy.tolist()
        targets = [t for t in range(world.n_enemy) if em[t]]
        null_ok = bool(em[world.n_enemy])
        move_legal = bool(mask.verb[Verb.MOVE]) and dirs
        attack_legal = bool(mask.verb[Verb.ATTACK])
    else:
        nf = world.n_friendly
        hp = world.hp.tolist()
        slots = [s for s in range(nf) if hp[s] > 0]
        dir_ok, n_dirs = _feasible_directions(world)
        dirs = [d for d, ok in enumerate(dir_ok.tolist()) if ok] if n_dirs else []
        targets = [t for t in range(len(hp) - nf) if hp[nf + t] > 0]
        null_ok = True
        move_legal = world.outcome is None and slots and dirs
        attack_legal = world.outcome is None and targets
    n_targets = len(targets) + (1 if null_ok else 0)
    subsets = (1 << len(slots)) - 1
    n_move = subsets * len(dirs) if move_legal else 0
    n_attack = subsets * n_targets if attack_legal else 0
    r = int(rng.integers(1 + n_move + n_attack))
    if r == 0:
        return IDLE_ACTION
    r -= 1
    if r < n_move:
        q, di = divmod(r, len(dirs))
        return StructuredAction(Verb.MOVE, _subset_bits(q + 1, slots), direction=dirs[di])
    r -= n_move
    q, ti = divmod(r, n_targets)
    who = _subset_bits(q + 1, slots)
    enemy_idx = targets[ti] if ti < len(targets) else None
    return StructuredAction(Verb.ATTACK, who, enemy_idx=enemy_idx)


def _subset_bits(q: int, slots: list[int]) -> int:
    # q in [1, 2^a - 1] indexes the non-empty subsets of `slots`.
    bits = 0
    for j, s in enumerate(slots):
        if q >> j & 1:
            bits |= 1 << s
    return bits


def agent_beacon_greedy(world: WorldState) -> StructuredAction:
    """March the whole group along the path of its closest unit to the beacon.

    Anchor = alive friendly nearest the beacon (ties to lower id); direction
    = compass vector best aligned with (next path waypoint - anchor); all
    alive units get that Move.  No-op only when nothing is alive or no path
    exists.
    """
    best = -1
    bestd = np.inf
    for f in range(world.n_friendly):
        if world.hp[f] > 0:
            dx = world.pos[f, 0] - world.beacon.x
            dy = world.pos[f, 1] - world.beacon.y
            d2 = dx * dx + dy * dy
            if d2 < bestd:
                bestd = d2
                best = f
    if best < 0:
        return IDLE_ACTION
    anchor = (float(world.pos[best, 0]), float(world.pos[best, 1]))
    path = find_path(world.grid, anchor, world.beacon)
    if path is None:
        return IDLE_ACTION
    target = path[1] if len(path) > 1 else world.beacon
    vx, vy = target.x - anchor[0], target.y - anchor[1]
    if vx == 0.0 and vy == 0.0:
        return IDLE_ACTION
    best_dir = 0
    best_dot = -np.inf
    for d in range(8):
        dot = vx * _kernels.DIR_DX[d] + vy * _kernels.DIR_DY[d]
        if dot > best_dot:
            best_dot = dot
            best_dir = d
    alive = [f for f in range(world.n_friendly) if world.hp[f] > 0]
    return StructuredAction(Verb.MOVE, who_bits(alive), direction=best_dir)


def agent_focus_fire(world: WorldState) -> StructuredAction:
    """Everyone attacks the lowest-hp alive enemy (ties to lower slot);
    no-op once the field is clear."""
    best = -1
    best_hp = np.iinfo(np.int32).max
    for e in range(world.n_enemy):
        hp = int(world.hp[world.n_friendly + e])
        if 0 < hp < best_hp:
            best_hp = hp
            best = e
    if best < 0:
        return IDLE_ACTION
    alive = [f for f in range(world.n_friendly) if world.hp[f] > 0]
    if not alive:
        return IDLE_ACTION
    return StructuredAction(Verb.ATTACK, who_bits(alive), enemy_idx=best)


def make_agent(name: str, structured: bool):
    """Uniform (world, mask, rng) -> action callable for the harness."""
    if name == "idle":
        if structured:
            return lambda world, mask, rng: IDLE_ACTION
        return lambda world, mask, rng: [0] * world.n_friendly

    if name == "random":
        if structured:
            return agent_random_masked
        return lambda world, mask, rng: [
            int(c) for c in rng.integers(flat_action_count(world.n_enemy), size=world.n_friendly)
        ]

    if name == "beacon-greedy":
        if not structured:
            raise ConfigError("beacon-greedy emits structured actions only")
        return lambda world, mask, rng: agent_beacon_greedy(world)

    if name == "focus-fire":
        if not structured:
            raise ConfigError("focus-fire emits structured actions only")
        return lambda world, mask, rng: agent_focus_fire(world)

    raise ConfigError(f"unknown agent {name!r}")


# -- sweep harness ---------------------------------------------------------


@dataclass(frozen=True)
class OutcomeDistribution:
    variant: str
    agent: str
    profile: str
    episodes: int
    seed_start: int
    counts: dict
    mean_steps: float
    mean_reward: float

    def rate(self, label: str) -> float:
        return self.counts[label] / self.episodes if self.episodes else 0.0


CSV_FIELDS = (
    "variant",
    "agent",
    "profile",
    "episodes",
    "seed_start",
    "navigation_victory",
    "combat_victory",
    "combat_loss",
    "tie",
    "timeout_loss",
    "mean_steps",
    "mean_reward",
)


def run_episodes(
    agent_name: str,
    config: EnvConfig,
    episodes: int,
    seed_start: int = 0,
    csv_path: str | None = None,
    verbose: bool = False,
) -> OutcomeDistribution:
    """Play consecutive seeds and tally outcomes.

    Spatial rendering is disabled unless the config pins it on: sweeps only
    consume outcomes and rewards.  Episode i uses env seed seed_start + i
    and an independent agent stream derived from the same seed.
    """
    if config.spatial is None:
        config = replace(config, spatial=False)
    env = TwoBridgeEnv(config)
    agent = make_agent(agent_name, env.structured)
    counts = {label: 0 for label in ("navigation_victory", "combat_victory", "combat_loss", "tie", "timeout_loss")}
    total_steps = 0
    total_reward = 0.0
    for i in range(episodes):
        seed = seed_start + i
        rng = np.random.Generator(np.random.PCG64(seed + (1 << 32)))
        result = env.reset(seed=seed)
        while not result.done:
            action = agent(env.world, result.mask, rng)
            result = env.step(action)
            total_steps += 1
            total_reward += result.reward.total
        counts[result.outcome.label] += 1
    dist = OutcomeDistribution(
        variant=config.variant,
        agent=agent_name,
        profile=config.profile,
        episodes=episodes,
        seed_start=seed_start,
        counts=counts,
        mean_steps=total_steps / episodes if episodes else 0.0,
        mean_reward=total_reward / episodes if episodes else 0.0,
    )
    if csv_path:
        write_csv([dist], csv_path)
    if verbose:
        print(format_table([dist]))
    return dist


def _dist_row(d: OutcomeDistribution) -> dict:
    row = {
        "variant": d.variant,
        "agent": d.agent,
        "profile": d.profile,
        "episodes": d.episodes,
        "seed_start": d.seed_start,
        "mean_steps": f"{d.mean_steps:.3f}",
        "mean_reward": f"{d.mean_reward:.6f}",
    }
    row.update({label: d.counts[label] for label in d.counts})
    return row


def write_csv(dists: list[OutcomeDistribution], path: str) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for d in dists:
            writer.writerow(_dist_row(d))


def format_table(dists: list[OutcomeDistribution]) -> str:
    header = f"{'variant':<12} {'agent':<14} {'n':>5} {'nav':>5} {'cwin':>5} {'closs':>5} {'tie':>4} {'tout':>5} {'steps':>8} {'reward':>10}"
    lines = [header, "-" * len(header)]
    for d in dists:
        c = d.counts
        lines.append(
            f"{d.variant:<12} {d.agent:<14} {d.episodes:>5} {c['navigation_victory']:>5} "
            f"{c['combat_victory']:>5} {c['combat_loss']:>5} {c['tie']:>4} {c['timeout_loss']:>5} "
            f"{d.mean_steps:>8.1f} {d.mean_reward:>10.3f}"
        )
    return "\n".join(lines)


# -- throughput ------------------------------------------------------------


@dataclass(frozen=True)
class BenchReport:
    config: EnvConfig
    duration_s: float
    single_steps: int
    single_steps_per_sec: float
    parallel_instances: int
    parallel_steps: int
    parallel_steps_per_sec: float


def _count_steps(config: EnvConfig, seconds: float, seed_start: int) -> int:
    env = TwoBridgeEnv(config)
    agent = make_agent("random", env.structured)
    rng = np.random.Generator(np.random.PCG64(seed_start + (1 << 32)))
    seed = seed_start
    result = env.reset(seed=seed)
    # Warm the compiled kernels before the timed section.
    for _ in range(3):
        result = env.step(agent(env.world, result.mask, rng))
        if result.done:
            seed += 1
            result = env.reset(seed=seed)
    steps = 0
    deadline = time.perf_counter() + seconds
    while time.perf_counter() < deadline:
        for _ in range(64):
            if result.done:
                seed += 1
                result = env.reset(seed=seed)
            result = env.step(agent(env.world, result.mask, rng))
            steps += 1
    return steps


def _bench_worker(config: EnvConfig, seconds: float, seed_start: int, out_q) -> None:
    out_q.put(_count_steps(config, seconds, seed_start))


def bench_throughput(
    config: EnvConfig,
    duration_s: float = 2.0,
    instances: int = 8,
) -> BenchReport:
    """Single-instance and parallel agent-steps/sec under the random agent.

    Parallel runs `instances` worker processes for the same duration and
    reports their aggregate rate.
    """
    if config.spatial is None:
        config = replace(config, spatial=False)
    single = _count_steps(config, duration_s, seed_start=0)
    parallel_total = 0
    if instances > 1:
        ctx = multiprocessing.get_context("fork")
        q = ctx.Queue()
        procs = [
            ctx.Process(target=_bench_worker, args=(config, duration_s, 10_000 * (w + 1), q))
            for w in range(instances)
        ]
        for p in procs:
            p.start()
        for _ in procs:
            parallel_total += q.get()
        for p in procs:
            p.join()
    return BenchReport(
        config=config,
        duration_s=duration_s,
        single_steps=single,
        single_steps_per_sec=single / duration_s,
        parallel_instances=instances,
        parallel_steps=parallel_total,
        parallel_steps_per_sec=parallel_total / duration_s,
    )
