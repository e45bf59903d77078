"""Engine tick semantics: movement, combat cadence, enemy AI, termination.

Fixed-point facts under test: a shot removes 6 hp, firing is gated by a
14-tick cooldown, move speed is 3.15/16 per tick with hard stops, attacks
resolve simultaneously against pre-phase hp, and termination priority is
capture, tie, combat victory, combat loss, timeout.
"""

from __future__ import annotations

import numpy as np
import pytest

from oracles import custom_world
from twobridge.engine import (
    DEFAULT_PARAMS,
    MAX_HP,
    NOOP_ORDER,
    OUTCOME_LABELS,
    TICK_LIMIT,
    TICKS_PER_SECOND,
    Outcome,
    OrderKind,
    apply_attack_order,
    apply_move,
    attack_order,
    check_termination,
    enemy_ai_step,
    make_world,
    move_order,
    run_ticks,
    set_friendly_orders,
    summarize,
    tick,
)
from twobridge.errors import InvalidTargetError, LifecycleError
from twobridge.spawn import get_variant, roll_spawns
from twobridge.world import DIRECTIONS, Position

SPEED = DEFAULT_PARAMS.move_speed
D = {name: i for i, name in enumerate(DIRECTIONS)}


def test_outcome_enum_frozen():
    assert [int(o) for o in Outcome] == [0, 1, 2, 3, 4]
    assert OUTCOME_LABELS == (
        "navigation_victory",
        "combat_victory",
        "combat_loss",
        "tie",
        "timeout_loss",
    )


def test_constants_frozen():
    assert TICKS_PER_SECOND == 16
    assert TICK_LIMIT == 4800
    assert MAX_HP == 45
    assert DEFAULT_PARAMS.damage_per_shot == 6
    assert DEFAULT_PARAMS.attack_range == 5.0
    assert DEFAULT_PARAMS.cooldown_ticks == 14
    assert DEFAULT_PARAMS.move_speed == pytest.approx(3.15 / 16)
    assert DEFAULT_PARAMS.acquisition_range == 6.0
    assert DEFAULT_PARAMS.unit_radius == 0.5
    assert DEFAULT_PARAMS.capture_radius == 2.0


def test_make_world_initial_state():
    w = custom_world([(10.0, 10.0), (12.0, 12.0)], [(50.0, 50.0)])
    assert w.n_friendly == 2 and w.n_units == 3 and w.n_enemy == 1
    assert w.tick == 0 and w.outcome is None
    assert np.all(w.hp == MAX_HP)
    assert np.all(w.cooldown == 0)
    assert np.all(w.provoked == 0)
    assert np.all(w.order_kind == OrderKind.NOOP)
    u = w.unit(0)
    assert u.team == "friendly" and u.alive and u.current_order == NOOP_ORDER
    assert w.unit(2).team == "enemy"
    assert len(w.units()) == 3


def test_inertia_without_orders():
    w = custom_world([(10.0, 10.0), (12.0, 12.0)], [(50.0, 50.0)])
    before = w.pos.copy()
    assert run_ticks(w, 8) is None
    assert w.tick == 8
    assert np.array_equal(w.pos, before)
    assert np.all(w.hp == MAX_HP)


def test_apply_move_cardinal(grid):
    p = apply_move((10.0, 10.0), D["E"], grid)
    assert p == Position(10.0 + SPEED, 10.0)
    p = apply_move((10.0, 10.0), D["N"], grid)
    assert p == Position(10.0, 10.0 - SPEED)
    p = apply_move((10.0, 10.0), D["S"], grid)
    assert p == Position(10.0, 10.0 + SPEED)
    p = apply_move((10.0, 10.0), D["W"], grid)
    assert p == Position(10.0 - SPEED, 10.0)


def test_apply_move_diagonal_unit_speed(grid):
    # A diagonal step covers the same distance as a cardinal one.
    p = apply_move((10.0, 10.0), D["NE"], grid)
    assert p.x == pytest.approx(10.0 + SPEED / np.sqrt(2))
    assert p.y == pytest.approx(10.0 - SPEED / np.sqrt(2))
    dist = np.hypot(p.x - 10.0, p.y - 10.0)
    assert dist == pytest.approx(SPEED)
    for name in ("NE", "NW", "SE", "SW"):
        q = apply_move((20.0, 20.0), D[name], grid)
        assert np.hypot(q.x - 20.0, q.y - 20.0) == pytest.approx(SPEED)


def test_apply_move_hard_stop_at_map_edge(grid):
    start = (0.05, 0.05)
    assert apply_move(start, D["N"], grid) == Position(*start)
    assert apply_move(start, D["W"], grid) == Position(*start)
    assert apply_move(start, D["NW"], grid) == Position(*start)
    # The open axis still works from the same spot.
    assert apply_move(start, D["S"], grid) == Position(0.05, 0.05 + SPEED)


def test_apply_move_hard_stop_at_cliff(grid):
    # Cliff occupies cells x in [31, 33); a step that lands in x >= 31 stops.
    start = (30.9, 10.0)
    assert apply_move(start, D["E"], grid) == Position(*start)
    assert apply_move(start, D["NE"], grid) == Position(*start)
    assert apply_move(start, D["SE"], grid) == Position(*start)
    moved = apply_move(start, D["N"], grid)
    assert moved == Position(30.9, 10.0 - SPEED)


def test_apply_move_rejects_bad_direction(grid):
    with pytest.raises(ValueError):
        apply_move((10.0, 10.0), 8, grid)
    with pytest.raises(ValueError):
        apply_move((10.0, 10.0), -1, grid)


def test_single_shot_damage_and_reset():
    w = custom_world([(10.0, 10.0)], [(13.0, 10.0)])
    apply_attack_order(w, 0, 1)
    assert w.hp[1] == MAX_HP - 6
    assert w.cooldown[0] == DEFAULT_PARAMS.cooldown_ticks - 1  # reset then tick decrement
    assert w.provoked[1] == 1  # damage provokes


def test_cooldown_gates_fire():
    w = custom_world([(10.0, 10.0)], [(13.0, 10.0)])
    w.cooldown[0] = 5
    apply_attack_order(w, 0, 1)
    assert w.hp[1] == MAX_HP
    assert w.cooldown[0] == 4


def test_attack_on_dead_target_degrades():
    w = custom_world([(10.0, 10.0)], [(13.0, 10.0)])
    w.hp[1] = 0
    set_friendly_orders(w, [attack_order(1)])
    w.outcome = None  # keep ticking despite the dead enemy
    apply_attack_order(w, 0, 1)
    assert w.order_kind[0] == OrderKind.NOOP
    assert w.hp[1] == 0


def test_out_of_range_attack_advances():
    w = custom_world([(10.0, 10.0)], [(20.0, 10.0)])
    apply_attack_order(w, 0, 1)
    assert w.hp[1] == MAX_HP
    assert w.pos[0, 0] > 10.0  # stepped toward the target
    assert abs(w.pos[0, 1] - 10.0) < 1.0


def test_fire_period_is_exactly_cooldown_ticks():
    w = custom_world([(10.0, 10.0)], [(13.0, 10.0)])
    w.cooldown[1] = 10_000  # silence the enemy; it still gets provoked
    set_friendly_orders(w, [attack_order(1)])
    hp_after = []
    for _ in range(29):
        run_ticks(w, 1)
        hp_after.append(int(w.hp[1]))
    # Shots land on ticks 1, 15, 29: period of exactly 14 ticks.
    assert hp_after[0] == 39
    assert all(h == 39 for h in hp_after[1:14])
    assert hp_after[14] == 33
    assert all(h == 33 for h in hp_after[15:28])
    assert hp_after[28] == 27
    assert w.hp[0] == MAX_HP


def test_simultaneous_mutual_kill_is_tie():
    w = custom_world([(10.0, 10.0)], [(13.0, 10.0)])
    w.hp[:] = 6
    set_friendly_orders(w, [attack_order(1)])
    out = run_ticks(w, 8)
    assert out is Outcome.TIE
    assert w.tick == 1  # stopped the tick the outcome fired
    assert w.outcome is Outcome.TIE
    assert w.hp[0] == 0 and w.hp[1] == 0


def test_set_friendly_orders_validation():
    w = custom_world([(10.0, 10.0), (12.0, 10.0)], [(50.0, 50.0)])
    with pytest.raises(ValueError):
        set_friendly_orders(w, [NOOP_ORDER])
    with pytest.raises(InvalidTargetError):
        set_friendly_orders(w, [attack_order(99), NOOP_ORDER])
    w.hp[0] = 0
    set_friendly_orders(w, [move_order(3), attack_order(2)])
    assert w.order_kind[0] == OrderKind.NOOP  # dead slot forced to no-op
    assert w.order_kind[1] == OrderKind.ATTACK


def test_enemy_ai_idle_when_unprovoked():
    w = custom_world([(10.0, 10.0)], [(30.0, 10.0)])
    assert enemy_ai_step(w) == [NOOP_ORDER]
    assert w.provoked[1] == 0


def test_enemy_ai_acquisition_provokes():
    w = custom_world([(10.0, 10.0)], [(15.5, 10.0)])
    assert enemy_ai_step(w) == [attack_order(0)]
    assert w.provoked[1] == 1
    assert w.order_kind[1] == OrderKind.ATTACK and w.order_target[1] == 0


def test_enemy_ai_targets_nearest_alive():
    w = custom_world([(8.0, 10.0), (13.0, 10.0)], [(10.0, 10.0)])
    assert enemy_ai_step(w) == [attack_order(0)]
    w.hp[0] = 0
    assert enemy_ai_step(w) == [attack_order(1)]


def test_enemy_ai_tie_breaks_to_lower_id():
    w = custom_world([(8.0, 10.0), (12.0, 10.0)], [(10.0, 10.0)])
    assert enemy_ai_step(w) == [attack_order(0)]


def test_enemy_ai_provocation_is_sticky():
    w = custom_world([(10.0, 10.0)], [(15.5, 10.0)])
    enemy_ai_step(w)
    assert w.provoked[1] == 1
    w.pos[0] = (50.0, 50.0)  # friendly retreats far beyond acquisition
    assert enemy_ai_step(w) == [attack_order(0)]


def test_enemy_ai_idles_with_no_live_target():
    w = custom_world([(10.0, 10.0)], [(15.5, 10.0)])
    enemy_ai_step(w)
    w.hp[0] = 0
    assert enemy_ai_step(w) == [NOOP_ORDER]


def test_termination_none_mid_episode():
    w = custom_world([(10.0, 10.0)], [(50.0, 50.0)], beacon=(60.0, 60.0))
    assert check_termination(w) is None


def test_termination_capture():
    w = custom_world([(10.0, 10.0)], [(50.0, 50.0)], beacon=(11.0, 10.0))
    assert check_termination(w) is Outcome.NAVIGATION_VICTORY


def test_termination_capture_radius_boundary():
    near = custom_world([(10.0, 10.0)], [(50.0, 50.0)], beacon=(11.9, 10.0))
    assert check_termination(near) is Outcome.NAVIGATION_VICTORY
    far = custom_world([(10.0, 10.0)], [(50.0, 50.0)], beacon=(12.1, 10.0))
    assert check_termination(far) is None


def test_termination_capture_preempts_combat_victory():
    w = custom_world([(10.0, 10.0)], [(50.0, 50.0)], beacon=(10.5, 10.0))
    w.hp[1] = 0
    assert check_termination(w) is Outcome.NAVIGATION_VICTORY


def test_termination_capture_preempts_timeout():
    w = custom_world([(10.0, 10.0)], [(50.0, 50.0)], beacon=(10.5, 10.0))
    w.tick = 300
    assert check_termination(w, tick_limit=300) is Outcome.NAVIGATION_VICTORY


def test_termination_tie_preempts_timeout():
    w = custom_world([(10.0, 10.0)], [(50.0, 50.0)])
    w.hp[:] = 0
    w.tick = 300
    assert check_termination(w, tick_limit=300) is Outcome.TIE


def test_termination_combat_victory():
    w = custom_world([(10.0, 10.0)], [(50.0, 50.0)])
    w.hp[1] = 0
    assert check_termination(w) is Outcome.COMBAT_VICTORY


def test_termination_combat_loss():
    w = custom_world([(10.0, 10.0)], [(50.0, 50.0)])
    w.hp[0] = 0
    assert check_termination(w) is Outcome.COMBAT_LOSS


def test_termination_timeout():
    w = custom_world([(10.0, 10.0)], [(50.0, 50.0)])
    w.tick = 300
    assert check_termination(w, tick_limit=300) is Outcome.TIMEOUT_LOSS
    assert check_termination(w, tick_limit=301) is None


def test_run_ticks_stops_at_timeout():
    w = custom_world([(10.0, 10.0)], [(50.0, 50.0)])
    out = run_ticks(w, 100, tick_limit=40)
    assert out is Outcome.TIMEOUT_LOSS
    assert w.tick == 40


def test_terminal_world_rejects_ticks():
    w = custom_world([(10.0, 10.0)], [(50.0, 50.0)])
    run_ticks(w, 40, tick_limit=40)
    assert w.outcome is Outcome.TIMEOUT_LOSS
    with pytest.raises(LifecycleError):
        run_ticks(w, 1)
    with pytest.raises(LifecycleError):
        tick(w, [NOOP_ORDER])


def test_tick_helper_installs_orders():
    w = custom_world([(10.0, 10.0)], [(50.0, 50.0)])
    tick(w, [move_order(D["E"])])
    assert w.tick == 1
    assert w.pos[0, 0] == pytest.approx(10.0 + SPEED)


def test_summarize_matches_hand_aggregates():
    w = custom_world([(10.0, 10.0), (14.0, 10.0)], [(50.0, 50.0)], beacon=(20.0, 10.0))
    w.hp[1] = 12
    s = summarize(w)
    assert s.friendly_alive == 2 and s.enemy_alive == 1
    assert s.friendly_bits == 0b11 and s.enemy_bits == 0b1
    assert s.hp_friendly == pytest.approx(45 + 12)
    assert s.hp_enemy == pytest.approx(45)
    assert s.avg_beacon_dist == pytest.approx((10.0 + 6.0) / 2)
    # Leading unit is the lowest-id alive friendly, not the closest one.
    assert s.leading_beacon_dist == pytest.approx(10.0)
    w.hp[0] = 0
    assert summarize(w).leading_beacon_dist == pytest.approx(6.0)
    w.hp[0] = 45
    cx, cy = 50.0, 50.0
    d0 = np.hypot(10.0 - cx, 10.0 - cy)
    d1 = np.hypot(14.0 - cx, 10.0 - cy)
    assert s.avg_enemy_centroid_dist == pytest.approx((d0 + d1) / 2)


def test_summarize_undefined_distances():
    w = custom_world([(10.0, 10.0)], [(50.0, 50.0)])
    w.hp[0] = 0
    s = summarize(w)
    assert s.friendly_alive == 0
    assert s.avg_beacon_dist == -1.0
    assert s.avg_enemy_centroid_dist == -1.0
    assert s.leading_beacon_dist == -1.0
    w2 = custom_world([(10.0, 10.0)], [(50.0, 50.0)])
    w2.hp[1] = 0
    assert summarize(w2).avg_enemy_centroid_dist == -1.0


def _random_orders(w, rng):
    orders = []
    for _ in range(w.n_friendly):
        roll = rng.random()
        if roll < 0.3:
            orders.append(NOOP_ORDER)
        elif roll < 0.8:
            orders.append(move_order(int(rng.integers(8))))
        else:
            orders.append(attack_order(int(rng.integers(w.n_friendly, w.n_units))))
    return orders


def test_random_episode_invariants(grid, regions):
    rng = np.random.Generator(np.random.PCG64(5))
    a = roll_spawns(get_variant("V3_Combat"), rng, regions=regions)
    w = make_world(grid, a)
    hp_prev = w.hp.copy()
    for _ in range(75):
        set_friendly_orders(w, _random_orders(w, rng))
        run_ticks(w, 8)
        assert np.all(w.hp <= hp_prev)  # hp never regenerates
        assert np.all(w.hp >= 0) and np.all(w.hp <= MAX_HP)
        assert np.all(w.cooldown >= 0)
        assert np.all(w.cooldown < DEFAULT_PARAMS.cooldown_ticks)
        for i in range(w.n_units):
            if w.alive(i):
                assert grid.is_passable((w.pos[i, 0], w.pos[i, 1]))
        hp_prev = w.hp.copy()
        if w.outcome is not None:
            break


def test_copy_isolates_and_reproduces(grid, regions):
    rng = np.random.Generator(np.random.PCG64(11))
    a = roll_spawns(get_variant("V2_Combat"), rng, regions=regions)
    w = make_world(grid, a)
    set_friendly_orders(w, [attack_order(w.n_friendly)] * w.n_friendly)
    run_ticks(w, 40)
    snap = w.copy()
    frozen = (snap.pos.copy(), snap.hp.copy(), snap.cooldown.copy(), snap.tick)
    run_ticks(w, 40)
    assert np.array_equal(snap.pos, frozen[0])
    assert np.array_equal(snap.hp, frozen[1])
    assert np.array_equal(snap.cooldown, frozen[2])
    assert snap.tick == frozen[3]
    run_ticks(snap, 40)
    assert np.array_equal(snap.pos, w.pos)
    assert np.array_equal(snap.hp, w.hp)
    assert snap.tick == w.tick
    assert snap.outcome == w.outcome
