"""Reward shaping: navigation and combat terms plus terminal payouts.

The shaped stack decomposes exactly as
    total = nav + combat_dist + combat_hp + combat_events + terminal.
Distance terms are potential deltas over *averages* of the alive group, so
they telescope over death-free segments and do not scale with unit count;
both emit 0 on any step where the relevant alive sets changed.

The pilot scheme is simpler: leading-unit beacon-distance delta, kill minus
loss count delta, and a +/-10 terminal payout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .engine import Outcome, WorldState, WorldSummary, summarize

TERMINAL_TABLE: dict[Outcome, float] = {
    Outcome.NAVIGATION_VICTORY: 25.0,
    Outcome.COMBAT_VICTORY: 10.0,
    Outcome.COMBAT_LOSS: -10.0,
    Outcome.TIMEOUT_LOSS: -15.0,
    Outcome.TIE: 0.0,
}

PILOT_TERMINAL_TABLE: dict[Outcome, float] = {
    Outcome.NAVIGATION_VICTORY: 10.0,
    Outcome.COMBAT_VICTORY: 10.0,
    Outcome.COMBAT_LOSS: -10.0,
    Outcome.TIMEOUT_LOSS: -10.0,
    Outcome.TIE: 0.0,
}


@dataclass(frozen=True)
class RewardParams:
    dist_scale: float = 1.0
    hp_scale: float = 0.01
    kill_bonus: float = 2.0
    casualty_penalty: float = 2.0


DEFAULT_REWARD_PARAMS = RewardParams()


class RewardBreakdown(NamedTuple):
    # NamedTuple rather than a dataclass: one of these is built per agent
    # step, and tuple construction keeps it off the profile.
    nav: float
    combat_dist: float
    combat_hp: float
    combat_events: float
    terminal: float
    total: float

    def as_dict(self) -> dict[str, float]:
        return {
            "nav": self.nav,
            "combat_dist": self.combat_dist,
            "combat_hp": self.combat_hp,
            "combat_events": self.combat_events,
            "terminal": self.terminal,
            "total": self.total,
        }


def _make_breakdown(
    nav: float, combat_dist: float, combat_hp: float, combat_events: float, terminal: float
) -> RewardBreakdown:
    # Total computed here and only here, in fixed order: the decomposition
    # is exact by construction.
    return RewardBreakdown(
        nav=nav,
        combat_dist=combat_dist,
        combat_hp=combat_hp,
        combat_events=combat_events,
        terminal=terminal,
        total=nav + combat_dist + combat_hp + combat_events + terminal,
    )


ZERO_BREAKDOWN = _make_breakdown(0.0, 0.0, 0.0, 0.0, 0.0)


def terminal_reward(outcome: Outcome | None) -> float:
    """Terminal payout of the shaped scheme; 0 while the episode runs."""
    if outcome is None:
        return 0.0
    return TERMINAL_TABLE[outcome]


def _nav_from_summaries(prev: WorldSummary, cur: WorldSummary) -> float:
    if prev.friendly_alive == 0 or prev.friendly_bits != cur.friendly_bits:
        return 0.0
    return prev.avg_beacon_dist - cur.avg_beacon_dist


def nav_shaping(prev: WorldState | WorldSummary, cur: WorldState | WorldSummary) -> float:
    """Decrease of the alive-friendly average distance to the beacon; 0 on
    steps where the alive friendly set changed.  Positive when approaching."""
    p = prev if isinstance(prev, WorldSummary) else summarize(prev)
    c = cur if isinstance(cur, WorldSummary) else summarize(cur)
    return _nav_from_summaries(p, c)


def _combat_from_summaries(
    prev: WorldSummary, cur: WorldSummary, params: RewardParams
) -> tuple[float, float, float]:
    if (
        prev.friendly_bits == cur.friendly_bits
        and prev.enemy_bits == cur.enemy_bits
        and prev.friendly_alive > 0
        and prev.enemy_alive > 0
    ):
        dist = params.dist_scale * (
            prev.avg_enemy_centroid_dist - cur.avg_enemy_centroid_dist
        )
    else:
        dist = 0.0
    hp = params.hp_scale * (
        (prev.hp_enemy - cur.hp_enemy) - (prev.hp_friendly - cur.hp_friendly)
    )
    events = params.kill_bonus * (prev.enemy_alive - cur.enemy_alive) - (
        params.casualty_penalty * (prev.friendly_alive - cur.friendly_alive)
    )
    return dist, hp, events


def combat_shaping(
    prev: WorldState | WorldSummary,
    cur: WorldState | WorldSummary,
    params: RewardParams = DEFAULT_REWARD_PARAMS,
) -> tuple[float, float, float]:
    """(distance, hp, events) combat terms between two states.

    Distance: decrease of the alive-friendly average distance to the alive
    enemy centroid, 0 when either alive set changed or a side is empty.
    Hp: scaled enemy hp drop minus friendly hp drop.  Events: kill bonus
    minus casualty penalty per death."""
    p = prev if isinstance(prev, WorldSummary) else summarize(prev)
    c = cur if isinstance(cur, WorldSummary) else summarize(cur)
    return _combat_from_summaries(p, c, params)


def shaped_breakdown(
    prev: WorldSummary,
    cur: WorldSummary,
    outcome: Outcome | None,
    params: RewardParams = DEFAULT_REWARD_PARAMS,
) -> RewardBreakdown:
    """Full shaped-stack breakdown for one agent step."""
    nav = params.dist_scale * _nav_from_summaries(prev, cur)
    dist, hp, events = _combat_from_summaries(prev, cur, params)
    return _make_breakdown(nav, dist, hp, events, terminal_reward(outcome))


def pilot_breakdown(
    prev: WorldSummary, cur: WorldSummary, outcome: Outcome | None
) -> RewardBreakdown:
    """Pilot scheme in breakdown form: the leading-unit distance delta sits
    in nav, the kill-minus-loss count delta in combat_events."""
    if prev.friendly_alive > 0 and cur.friendly_alive > 0:
        nav = prev.leading_beacon_dist - cur.leading_beacon_dist
    else:
        nav = 0.0
    events = float(
        (prev.enemy_alive - cur.enemy_alive) - (prev.friendly_alive - cur.friendly_alive)
    )
    terminal = 0.0 if outcome is None else PILOT_TERMINAL_TABLE[outcome]
    return _make_breakdown(nav, 0.0, 0.0, events, terminal)


def pilot_reward(
    prev: WorldState | WorldSummary,
    cur: WorldState | WorldSummary,
    outcome: Outcome | None = None,
) -> float:
    """Scalar pilot reward between two states."""
    p = prev if isinstance(prev, WorldSummary) else summarize(prev)
    c = cur if isinstance(cur, WorldSummary) else summarize(cur)
    return pilot_breakdown(p, c, outcome).total
