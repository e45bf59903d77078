"""Compiled kernels for the simulation hot path.

Everything here works on plain numpy arrays so per-tick work stays in
machine code; the public modules wrap these in typed interfaces.  All
loops iterate in ascending index order, which is what makes the engine
bit-deterministic.
"""

from __future__ import annotations

import numpy as np
from numba import njit

INV_SQRT2 = 0.7071067811865476
SQRT2 = 1.4142135623730951

# Compass order: N, S, W, E, NE, NW, SE, SW.  x grows eastward, y grows
# southward (screen convention), so N is negative y.
DIR_DX = np.array(
    [0.0, 0.0, -1.0, 1.0, INV_SQRT2, -INV_SQRT2, INV_SQRT2, -INV_SQRT2]
)
DIR_DY = np.array(
    [-1.0, 1.0, 0.0, 0.0, -INV_SQRT2, -INV_SQRT2, INV_SQRT2, INV_SQRT2]
)

# 8-connected cell offsets for pathfinding: cardinals first, then diagonals.
STEP_DX = np.array([0, 0, -1, 1, 1, -1, 1, -1], dtype=np.int64)
STEP_DY = np.array([-1, 1, 0, 0, -1, -1, 1, 1], dtype=np.int64)

# Path costs are tracked in integer quanta: a cardinal step costs 2^15, a
# diagonal round(sqrt(2) * 2^15).  On grids up to 64x64 the rounding error
# (<= 0.05 quanta per diagonal) stays far below the smallest gap between
# distinct exact costs a + b*sqrt(2), so integer comparisons reproduce the
# exact-real (f, h, cell) order without float addition-order sensitivity.
COST_Q = 1 << 15
COST_DIAG_Q = 46341
STEP_COST_Q = np.array([COST_Q] * 4 + [COST_DIAG_Q] * 4, dtype=np.int64)

# Order kinds as stored in the order_kind arrays.
ORDER_NOOP = 0
ORDER_MOVE = 1
ORDER_ATTACK = 2

# Outcome codes as returned by check_termination (-1 = still running).
OUT_NONE = -1
OUT_NAVIGATION_VICTORY = 0
OUT_COMBAT_VICTORY = 1
OUT_COMBAT_LOSS = 2
OUT_TIE = 3
OUT_TIMEOUT_LOSS = 4


# ---------------------------------------------------------------------------
# pathfinding
# ---------------------------------------------------------------------------


@njit(cache=True)
def _octile_q(dx, dy):
    # Octile distance in cost quanta; dx, dy nonnegative.
    if dx < dy:
        dx, dy = dy, dx
    return (dx - dy) * COST_Q + dy * COST_DIAG_Q


@njit(cache=True)
def astar_cells(
    passable, edge_bits, start, goal, out_cells, g_q, visit_gen, closed_gen, came, heap, genbox
):
    """Shortest 8-connected path start -> goal, written to out_cells as
    flat cell indices (y * width + x) including both endpoints.

    Cardinal steps cost 1, diagonal steps sqrt(2) (in quanta; see
    COST_Q).  A diagonal step is allowed only when both adjacent cardinal
    cells are passable (no corner cutting); edge_bits precomputes that
    rule per cell.  Ties break lexicographically on (f, h, cell index);
    each heap entry packs all three into one int64 as
    (f_q << 34) | (h_q << 12) | cell, which requires width and height
    <= 64.  The scratch buffers are caller-owned: g_q/came are stamped by
    visit_gen/closed_gen against the generation counter in genbox, so
    nothing is cleared between calls and the hot path never allocates.
    Returns the number of cells written, or 0 if no path exists or
    out_cells is too small.
    """
    h_, w = passable.shape
    sx = start % w
    sy = start // w
    gx = goal % w
    gy = goal // w
    if not passable[sy, sx] or not passable[gy, gx]:
        return 0
    if start == goal:
        out_cells[0] = start
        return 1

    gen = genbox[0] + 1
    if gen >= 2147483647:  # stamp wrap: reset once every ~2^31 plans
        for i in range(visit_gen.shape[0]):
            visit_gen[i] = 0
            closed_gen[i] = 0
        gen = 1
    genbox[0] = gen
    cap = heap.shape[0]

    h0 = _octile_q(abs(sx - gx), abs(sy - gy))
    g_q[start] = 0
    visit_gen[start] = gen
    came[start] = -1
    heap[0] = (h0 << 34) | (h0 << 12) | start
    size = 1

    found = False
    while size > 0:
        key = heap[0]
        size -= 1
        last = heap[size]
        i = 0
        while True:
            l = 2 * i + 1
            if l >= size:
                break
            r = l + 1
            if r < size and heap[r] < heap[l]:
                l = r
            if heap[l] < last:
                heap[i] = heap[l]
                i = l
            else:
                break
        heap[i] = last
        cur = key & 0xFFF
        if closed_gen[cur] == gen:
            continue
        closed_gen[cur] = gen
        if cur == goal:
            found = True
            break
        cx = cur % w
        cy = cur // w
        gc = g_q[cur]
        eb = edge_bits[cur]
        for k in range(8):
            if not eb >> k & 1:
                continue
            nx = cx + STEP_DX[k]
            ny = cy + STEP_DY[k]
            nc = ny * w + nx
            if closed_gen[nc] == gen:
                continue
            ng = gc + STEP_COST_Q[k]
            if visit_gen[nc] != gen or ng < g_q[nc]:
                g_q[nc] = ng
                visit_gen[nc] = gen
                came[nc] = cur
                if size < cap:
                    hq = _octile_q(abs(nx - gx), abs(ny - gy))
                    key2 = ((ng + hq) << 34) | (hq << 12) | nc
                    i = size
                    while i > 0:
                        p = (i - 1) >> 1
                        if key2 < heap[p]:
                            heap[i] = heap[p]
                            i = p
                        else:
                            break
                    heap[i] = key2
                    size += 1
    if not found:
        return 0

    ln = 0
    c = goal
    while c != -1:
        ln += 1
        c = came[c]
    if ln > out_cells.shape[0]:
        return 0
    c = goal
    for i in range(ln - 1, -1, -1):
        out_cells[i] = c
        c = came[c]
    return ln


# ---------------------------------------------------------------------------
# movement
# ---------------------------------------------------------------------------


@njit(cache=True)
def _try_move_to(passable, pos, i, nx, ny):
    # Hard stop: the move lands only if the destination cell is in bounds
    # and passable; otherwise the position is unchanged.
    h_, w = passable.shape
    cx = int(np.floor(nx))
    cy = int(np.floor(ny))
    if 0 <= cx < w and 0 <= cy < h_ and passable[cy, cx]:
        pos[i, 0] = nx
        pos[i, 1] = ny


@njit(cache=True)
def try_move_direction(passable, pos, i, d, speed):
    nx = pos[i, 0] + speed * DIR_DX[d]
    ny = pos[i, 1] + speed * DIR_DY[d]
    _try_move_to(passable, pos, i, nx, ny)


@njit(cache=True)
def advance_along_path(
    passable,
    pos,
    path_cells,
    path_len,
    path_idx,
    path_goal,
    astar_scratch,
    i,
    tx,
    ty,
    speed,
):
    """One tick of attack-move steering for unit i toward world point (tx, ty).

    The unit keeps a planned cell path; the plan is recomputed when the
    target changes cell, the unit leaves the plan, or no plan exists.
    """
    h_, w = passable.shape
    my = int(np.floor(pos[i, 1])) * w + int(np.floor(pos[i, 0]))
    goal = int(np.floor(ty)) * w + int(np.floor(tx))

    ok = path_len[i] > 0 and path_goal[i] == goal
    if ok and path_cells[i, path_idx[i]] != my:
        if path_idx[i] + 1 < path_len[i] and path_cells[i, path_idx[i] + 1] == my:
            path_idx[i] += 1
        else:
            ok = False
    if not ok:
        edge_bits, g_q, visit_gen, closed_gen, came, heap, genbox = astar_scratch
        plen = astar_cells(
            passable,
            edge_bits,
            my,
            goal,
            path_cells[i],
            g_q,
            visit_gen,
            closed_gen,
            came,
            heap,
            genbox,
        )
        path_len[i] = plen
        path_idx[i] = 0
        path_goal[i] = goal
        if plen == 0:
            return
    if path_idx[i] + 1 < path_len[i]:
        nc = path_cells[i, path_idx[i] + 1]
        wx = nc % w + 0.5
        wy = nc // w + 0.5
    else:
        wx = tx
        wy = ty
    dx = wx - pos[i, 0]
    dy = wy - pos[i, 1]
    dist = np.sqrt(dx * dx + dy * dy)
    if dist < 1e-9:
        return
    _try_move_to(passable, pos, i, pos[i, 0] + speed * dx / dist, pos[i, 1] + speed * dy / dist)


# ---------------------------------------------------------------------------
# tick phases
# ---------------------------------------------------------------------------


@njit(cache=True)
def phase_degrade_orders(hp, order_kind, order_target, n):
    # Attack orders on dead attackers or dead targets degrade to no-op.
    for i in range(n):
        if order_kind[i] == ORDER_ATTACK and (hp[i] <= 0 or hp[order_target[i]] <= 0):
            order_kind[i] = ORDER_NOOP


@njit(cache=True)
def phase_enemy_ai(pos, hp, provoked, order_kind, order_target, n_friendly, n, acq_range):
    acq2 = acq_range * acq_range
    for e in range(n_friendly, n):
        if hp[e] <= 0:
            continue
        if not provoked[e]:
            for f in range(n_friendly):
                if hp[f] > 0:
                    dx = pos[e, 0] - pos[f, 0]
                    dy = pos[e, 1] - pos[f, 1]
                    if dx * dx + dy * dy <= acq2:
                        provoked[e] = 1
                        break
        if provoked[e]:
            best = -1
            bestd = np.inf
            for f in range(n_friendly):
                if hp[f] > 0:
                    dx = pos[e, 0] - pos[f, 0]
                    dy = pos[e, 1] - pos[f, 1]
                    d2 = dx * dx + dy * dy
                    if d2 < bestd:
                        bestd = d2
                        best = f
            if best >= 0:
                order_kind[e] = ORDER_ATTACK
                order_target[e] = best
            else:
                order_kind[e] = ORDER_NOOP


@njit(cache=True)
def phase_movement(
    passable,
    pos,
    hp,
    order_kind,
    order_dir,
    order_target,
    path_cells,
    path_len,
    path_idx,
    path_goal,
    astar_scratch,
    n,
    attack_range,
    speed,
):
    ar2 = attack_range * attack_range
    for i in range(n):
        if hp[i] <= 0:
            continue
        k = order_kind[i]
        if k == ORDER_MOVE:
            try_move_direction(passable, pos, i, order_dir[i], speed)
        elif k == ORDER_ATTACK:
            t = order_target[i]
            if hp[t] > 0:
                dx = pos[i, 0] - pos[t, 0]
                dy = pos[i, 1] - pos[t, 1]
                if dx * dx + dy * dy > ar2:
                    advance_along_path(
                        passable,
                        pos,
                        path_cells,
                        path_len,
                        path_idx,
                        path_goal,
                        astar_scratch,
                        i,
                        pos[t, 0],
                        pos[t, 1],
                        speed,
                    )


@njit(cache=True)
def phase_attacks(
    pos,
    hp,
    cooldown,
    provoked,
    order_kind,
    order_target,
    dmg,
    n_friendly,
    n,
    damage,
    attack_range,
    cooldown_ticks,
):
    # Fire decisions use the hp snapshot from before this phase, so two
    # units can trade lethal shots in the same tick (mutual kill -> tie).
    ar2 = attack_range * attack_range
    for i in range(n):
        dmg[i] = 0
    for i in range(n):
        if hp[i] <= 0 or order_kind[i] != ORDER_ATTACK:
            continue
        t = order_target[i]
        if hp[t] <= 0:
            continue
        dx = pos[i, 0] - pos[t, 0]
        dy = pos[i, 1] - pos[t, 1]
        if dx * dx + dy * dy <= ar2 and cooldown[i] == 0:
            dmg[t] += damage
            cooldown[i] = cooldown_ticks
    for i in range(n):
        if dmg[i] > 0:
            if i >= n_friendly:
                provoked[i] = 1
            nh = hp[i] - dmg[i]
            if nh < 0:
                nh = 0
            hp[i] = nh
            if nh == 0:
                order_kind[i] = ORDER_NOOP


@njit(cache=True)
def phase_cooldown(cooldown, n):
    for i in range(n):
        if cooldown[i] > 0:
            cooldown[i] -= 1


@njit(cache=True)
def check_termination_kernel(pos, hp, bx, by, tick, tick_limit, capture_radius, n_friendly, n):
    # Priority: capture, tie, combat victory, combat loss, timeout.
    cr2 = capture_radius * capture_radius
    for f in range(n_friendly):
        if hp[f] > 0:
            dx = pos[f, 0] - bx
            dy = pos[f, 1] - by
            if dx * dx + dy * dy <= cr2:
                return OUT_NAVIGATION_VICTORY
    fa = 0
    ea = 0
    for f in range(n_friendly):
        if hp[f] > 0:
            fa += 1
    for e in range(n_friendly, n):
        if hp[e] > 0:
            ea += 1
    if ea == 0 and fa == 0:
        return OUT_TIE
    if ea == 0:
        return OUT_COMBAT_VICTORY
    if fa == 0:
        return OUT_COMBAT_LOSS
    if tick >= tick_limit:
        return OUT_TIMEOUT_LOSS
    return OUT_NONE


@njit(cache=True)
def run_window(
    passable,
    pos,
    hp,
    cooldown,
    provoked,
    order_kind,
    order_dir,
    order_target,
    path_cells,
    path_len,
    path_idx,
    path_goal,
    astar_scratch,
    dmg_scratch,
    bx,
    by,
    tick,
    tick_limit,
    n_friendly,
    damage,
    attack_range,
    cooldown_ticks,
    speed,
    acq_range,
    capture_radius,
    k_ticks,
):
    """Advance up to k_ticks engine ticks with the current orders held.

    Stops early the tick an outcome is reached.  Returns (tick, outcome)
    with outcome -1 while the episode is still running.
    """
    n = pos.shape[0]
    outcome = OUT_NONE
    for _ in range(k_ticks):
        phase_degrade_orders(hp, order_kind, order_target, n)
        phase_enemy_ai(pos, hp, provoked, order_kind, order_target, n_friendly, n, acq_range)
        phase_movement(
            passable,
            pos,
            hp,
            order_kind,
            order_dir,
            order_target,
            path_cells,
            path_len,
            path_idx,
            path_goal,
            astar_scratch,
            n,
            attack_range,
            speed,
        )
        phase_attacks(
            pos,
            hp,
            cooldown,
            provoked,
            order_kind,
            order_target,
            dmg_scratch,
            n_friendly,
            n,
            damage,
            attack_range,
            cooldown_ticks,
        )
        phase_cooldown(cooldown, n)
        tick += 1
        outcome = check_termination_kernel(
            pos, hp, bx, by, tick, tick_limit, capture_radius, n_friendly, n
        )
        if outcome >= 0:
            break
    return tick, outcome


# ---------------------------------------------------------------------------
# derived views: masks, summaries, observations
# ---------------------------------------------------------------------------


@njit(cache=True)
def feasible_directions(passable, pos, hp, n_friendly, speed, out8):
    """out8[d] = True iff at least one alive friendly would change position
    moving one tick in direction d.  Returns the number of feasible ones."""
    h_, w = passable.shape
    count = 0
    for d in range(8):
        out8[d] = False
    for f in range(n_friendly):
        if hp[f] <= 0:
            continue
        for d in range(8):
            if out8[d]:
                continue
            nx = pos[f, 0] + speed * DIR_DX[d]
            ny = pos[f, 1] + speed * DIR_DY[d]
            cx = int(np.floor(nx))
            cy = int(np.floor(ny))
            if 0 <= cx < w and 0 <= cy < h_ and passable[cy, cx]:
                out8[d] = True
                count += 1
        if count == 8:
            break
    return count


@njit(cache=True)
def world_summary(pos, hp, bx, by, n_friendly, out_f, out_i):
    """Aggregates consumed by reward shaping.

    out_f: [hp_friendly, hp_enemy, avg_beacon_dist, avg_enemy_centroid_dist,
            leading_unit_beacon_dist]  (-1.0 where undefined)
    out_i: [friendly_alive, enemy_alive, friendly_alive_bits, enemy_alive_bits]
    """
    n = pos.shape[0]
    fa = 0
    ea = 0
    hp_f = 0.0
    hp_e = 0.0
    fbits = 0
    ebits = 0
    ecx = 0.0
    ecy = 0.0
    for f in range(n_friendly):
        if hp[f] > 0:
            fa += 1
            hp_f += hp[f]
            fbits |= 1 << f
    for e in range(n_friendly, n):
        if hp[e] > 0:
            ea += 1
            hp_e += hp[e]
            ebits |= 1 << (e - n_friendly)
            ecx += pos[e, 0]
            ecy += pos[e, 1]
    avg_beacon = -1.0
    avg_cent = -1.0
    lead = -1.0
    if fa > 0:
        s = 0.0
        for f in range(n_friendly):
            if hp[f] > 0:
                dx = pos[f, 0] - bx
                dy = pos[f, 1] - by
                d = np.sqrt(dx * dx + dy * dy)
                s += d
                if lead < 0.0:
                    lead = d
        avg_beacon = s / fa
        if ea > 0:
            ex = ecx / ea
            ey = ecy / ea
            s2 = 0.0
            for f in range(n_friendly):
                if hp[f] > 0:
                    dx = pos[f, 0] - ex
                    dy = pos[f, 1] - ey
                    s2 += np.sqrt(dx * dx + dy * dy)
            avg_cent = s2 / fa
    out_f[0] = hp_f
    out_f[1] = hp_e
    out_f[2] = avg_beacon
    out_f[3] = avg_cent
    out_f[4] = lead
    out_i[0] = fa
    out_i[1] = ea
    out_i[2] = fbits
    out_i[3] = ebits


@njit(cache=True)
def vector_obs(
    pos,
    hp,
    cooldown,
    bx,
    by,
    tick,
    n_friendly,
    max_hp,
    cooldown_ticks,
    map_size,
    ticks_per_second,
    out,
):
    """Fixed-layout feature vector; dead slots zero-filled.

    Per friendly slot: x, y, hp, cooldown, dist_to_beacon (5 entries).
    Per enemy slot: x, y, hp, cooldown (4 entries).
    Tail: beacon x, beacon y, elapsed seconds, enemies remaining.
    """
    n = pos.shape[0]
    k = 0
    for f in range(n_friendly):
        if hp[f] > 0:
            out[k] = pos[f, 0] / map_size
            out[k + 1] = pos[f, 1] / map_size
            out[k + 2] = hp[f] / max_hp
            out[k + 3] = cooldown[f] / cooldown_ticks
            dx = pos[f, 0] - bx
            dy = pos[f, 1] - by
            out[k + 4] = np.sqrt(dx * dx + dy * dy) / map_size
        else:
            out[k] = 0.0
            out[k + 1] = 0.0
            out[k + 2] = 0.0
            out[k + 3] = 0.0
            out[k + 4] = 0.0
        k += 5
    ea = 0
    for e in range(n_friendly, n):
        if hp[e] > 0:
            ea += 1
            out[k] = pos[e, 0] / map_size
            out[k + 1] = pos[e, 1] / map_size
            out[k + 2] = hp[e] / max_hp
            out[k + 3] = cooldown[e] / cooldown_ticks
        else:
            out[k] = 0.0
            out[k + 1] = 0.0
            out[k + 2] = 0.0
            out[k + 3] = 0.0
        k += 4
    out[k] = bx / map_size
    out[k + 1] = by / map_size
    out[k + 2] = tick / ticks_per_second
    out[k + 3] = ea


@njit(cache=True)
def step_window(
    passable,
    pos,
    hp,
    cooldown,
    provoked,
    order_kind,
    order_dir,
    order_target,
    path_cells,
    path_len,
    path_idx,
    path_goal,
    astar_scratch,
    dmg_scratch,
    bx,
    by,
    tick,
    tick_limit,
    n_friendly,
    damage,
    attack_range,
    cooldown_ticks,
    speed,
    acq_range,
    capture_radius,
    k_ticks,
    max_hp,
    map_size,
    ticks_per_second,
    vec,
    out_f,
    out_i,
):
    """One agent step fused into a single compiled call: the tick window,
    then the summary aggregates and feature vector of the settled state."""
    t, outcome = run_window(
        passable,
        pos,
        hp,
        cooldown,
        provoked,
        order_kind,
        order_dir,
        order_target,
        path_cells,
        path_len,
        path_idx,
        path_goal,
        astar_scratch,
        dmg_scratch,
        bx,
        by,
        tick,
        tick_limit,
        n_friendly,
        damage,
        attack_range,
        cooldown_ticks,
        speed,
        acq_range,
        capture_radius,
        k_ticks,
    )
    world_summary(pos, hp, bx, by, n_friendly, out_f, out_i)
    vector_obs(
        pos,
        hp,
        cooldown,
        bx,
        by,
        t,
        n_friendly,
        max_hp,
        cooldown_ticks,
        map_size,
        ticks_per_second,
        vec,
    )
    return t, outcome


@njit(cache=True)
def render_screen(
    passable,
    pos,
    hp,
    cooldown,
    selected,
    bx,
    by,
    cam_x,
    cam_y,
    extent,
    n_friendly,
    max_hp,
    cooldown_ticks,
    out,
):
    """Camera-relative screen planes, values in [0, 1], collisions take max.

    Channels: 0 passability, 1 friendly presence, 2 enemy presence,
    3 friendly hp heat, 4 enemy hp heat, 5 beacon, 6 friendly cooldown heat,
    7 enemy cooldown heat, 8 selection, 9 map extent, 10.. reserved zeros.
    """
    h_, w = passable.shape
    res = out.shape[1]
    n = pos.shape[0]
    scale = extent / res
    ox = cam_x - extent / 2.0
    oy = cam_y - extent / 2.0
    for c in range(out.shape[0]):
        for py in range(res):
            for px in range(res):
                out[c, py, px] = 0.0
    for py in range(res):
        wy = oy + (py + 0.5) * scale
        iy = int(np.floor(wy))
        for px in range(res):
            wx = ox + (px + 0.5) * scale
            ix = int(np.floor(wx))
            if 0 <= ix < w and 0 <= iy < h_:
                out[9, py, px] = 1.0
                if passable[iy, ix]:
                    out[0, py, px] = 1.0
    for i in range(n):
        if hp[i] <= 0:
            continue
        px = int(np.floor((pos[i, 0] - ox) / scale))
        py = int(np.floor((pos[i, 1] - oy) / scale))
        if px < 0 or px >= res or py < 0 or py >= res:
            continue
        hv = hp[i] / max_hp
        cv = cooldown[i] / cooldown_ticks
        if i < n_friendly:
            out[1, py, px] = 1.0
            if hv > out[3, py, px]:
                out[3, py, px] = hv
            if cv > out[6, py, px]:
                out[6, py, px] = cv
            if selected[i]:
                out[8, py, px] = 1.0
        else:
            out[2, py, px] = 1.0
            if hv > out[4, py, px]:
                out[4, py, px] = hv
            if cv > out[7, py, px]:
                out[7, py, px] = cv
    bpx = int(np.floor((bx - ox) / scale))
    bpy = int(np.floor((by - oy) / scale))
    if 0 <= bpx < res and 0 <= bpy < res:
        out[5, bpy, bpx] = 1.0


@njit(cache=True)
def render_minimap(passable, pos, hp, bx, by, n_friendly, max_hp, out):
    """Whole-map planes at one cell per pixel; camera-invariant.

    Channels: 0 passability, 1 friendly presence, 2 enemy presence,
    3 friendly hp heat, 4 enemy hp heat, 5 beacon, 6 reserved zero.
    """
    h_, w = passable.shape
    n = pos.shape[0]
    for c in range(out.shape[0]):
        for py in range(h_):
            for px in range(w):
                out[c, py, px] = 0.0
    for py in range(h_):
        for px in range(w):
            if passable[py, px]:
                out[0, py, px] = 1.0
    for i in range(n):
        if hp[i] <= 0:
            continue
        px = int(np.floor(pos[i, 0]))
        py = int(np.floor(pos[i, 1]))
        if px < 0 or px >= w or py < 0 or py >= h_:
            continue
        hv = hp[i] / max_hp
        if i < n_friendly:
            out[1, py, px] = 1.0
            if hv > out[3, py, px]:
                out[3, py, px] = hv
        else:
            out[2, py, px] = 1.0
            if hv > out[4, py, px]:
                out[4, py, px] = hv
    bpx = int(np.floor(bx))
    bpy = int(np.floor(by))
    if 0 <= bpx < w and 0 <= bpy < h_:
        out[5, bpy, bpx] = 1.0
