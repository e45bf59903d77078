"""Independent reference implementations used to check the package.

Everything here is deliberately written from the documented rules rather
than the library's internals: plain BFS flood fills, an exact-arithmetic
Dijkstra over (cardinal, diagonal) step counts, and small world builders.
"""

from __future__ import annotations

import heapq
import math
from collections import deque

import numpy as np

from twobridge.engine import CombatParams, DEFAULT_PARAMS, WorldState, make_world
from twobridge.spawn import SpawnAssignment
from twobridge.world import Position, TerrainGrid, default_map

SQRT2 = math.sqrt(2.0)

# Compass order shared with the library: N S W E NE NW SE SW.
STEPS = ((0, -1), (0, 1), (-1, 0), (1, 0), (1, -1), (-1, -1), (1, 1), (-1, 1))


def neighbors8(passable: np.ndarray, cx: int, cy: int):
    """8-connected passable neighbors honoring the no-corner-cut rule.

    Yields ((nx, ny), is_diagonal).
    """
    h, w = passable.shape
    for k, (dx, dy) in enumerate(STEPS):
        nx, ny = cx + dx, cy + dy
        if not (0 <= nx < w and 0 <= ny < h):
            continue
        if not passable[ny, nx]:
            continue
        if k >= 4 and not (passable[cy, nx] and passable[ny, cx]):
            continue
        yield (nx, ny), k >= 4


def bfs_cells(passable: np.ndarray, start: tuple[int, int], diagonal: bool = False) -> set:
    """Flood fill from start; 4-connected by default, 8-connected (with the
    corner rule) when diagonal=True."""
    h, w = passable.shape
    sx, sy = start
    if not passable[sy, sx]:
        return set()
    seen = {(sx, sy)}
    q = deque([(sx, sy)])
    while q:
        cx, cy = q.popleft()
        if diagonal:
            for (nx, ny), _ in neighbors8(passable, cx, cy):
                if (nx, ny) not in seen:
                    seen.add((nx, ny))
                    q.append((nx, ny))
        else:
            for dx, dy in STEPS[:4]:
                nx, ny = cx + dx, cy + dy
                if 0 <= nx < w and 0 <= ny < h and passable[ny, nx] and (nx, ny) not in seen:
                    seen.add((nx, ny))
                    q.append((nx, ny))
    return seen


def exact_less(c1: tuple[int, int], c2: tuple[int, int]) -> bool:
    """Compare a1 + b1*sqrt(2) < a2 + b2*sqrt(2) exactly (integer a, b)."""
    a = c1[0] - c2[0]
    b = c1[1] - c2[1]
    if a == 0 and b == 0:
        return False
    if a <= 0 and b <= 0:
        return True
    if a >= 0 and b >= 0:
        return False
    if a < 0:  # b > 0: need b*sqrt2 < -a
        return 2 * b * b < a * a
    return a * a < 2 * b * b  # a > 0, b < 0: need a < -b*sqrt2


def dijkstra_cost(
    passable: np.ndarray, start: tuple[int, int], goal: tuple[int, int]
) -> tuple[int, int] | None:
    """Exact optimal cost start->goal as (cardinal, diagonal) step counts.

    The exact value a + b*sqrt(2) is unique at the optimum (sqrt(2) is
    irrational), so this is a sound equality oracle for any shortest path.
    Returns None when the goal is unreachable.
    """
    if not passable[start[1], start[0]] or not passable[goal[1], goal[0]]:
        return None
    best: dict[tuple[int, int], tuple[int, int]] = {start: (0, 0)}
    heap: list[tuple[float, tuple[int, int]]] = [(0.0, start)]
    done: set[tuple[int, int]] = set()
    while heap:
        _, c = heapq.heappop(heap)
        if c in done:
            continue
        done.add(c)
        if c == goal:
            return best[c]
        a0, b0 = best[c]
        for (nx, ny), diag in neighbors8(passable, c[0], c[1]):
            cand = (a0 + (0 if diag else 1), b0 + (1 if diag else 0))
            cur = best.get((nx, ny))
            if cur is None or exact_less(cand, cur):
                best[(nx, ny)] = cand
                heapq.heappush(heap, (cand[0] + cand[1] * SQRT2, (nx, ny)))
    return None


def path_cells(path) -> list[tuple[int, int]]:
    return [(int(math.floor(p.x)), int(math.floor(p.y))) for p in path]


def path_step_counts(path) -> tuple[int, int]:
    """(cardinal, diagonal) step counts of a waypoint path's cell sequence."""
    cells = path_cells(path)
    a = b = 0
    for (x0, y0), (x1, y1) in zip(cells, cells[1:]):
        dx, dy = abs(x1 - x0), abs(y1 - y0)
        assert (dx, dy) in ((0, 1), (1, 0), (1, 1)), f"non-adjacent step {dx, dy}"
        if dx and dy:
            b += 1
        else:
            a += 1
    return a, b


# -- constructed worlds ----------------------------------------------------


def pocket_grid(rows: list[str]) -> TerrainGrid:
    """Tiny grid from ASCII rows: '#' wall, anything else open."""
    passable = np.array(
        [[0 if ch == "#" else 1 for ch in row] for row in rows], dtype=np.uint8
    )
    return TerrainGrid(
        width=passable.shape[1],
        height=passable.shape[0],
        passable=passable,
        bridge_cells=(frozenset(), frozenset()),
        cliff_column_range=(0, 0),
    )


def custom_world(
    friendly: list[tuple[float, float]],
    enemy: list[tuple[float, float]],
    beacon: tuple[float, float] = (60.0, 60.0),
    params: CombatParams = DEFAULT_PARAMS,
    grid: TerrainGrid | None = None,
) -> WorldState:
    """World with explicit positions, skipping the spawn roll."""
    if grid is None:
        grid = default_map()[0]
    fp = tuple(Position(float(x), float(y)) for x, y in friendly)
    ep = tuple(Position(float(x), float(y)) for x, y in enemy)
    cam = fp[0] if fp else Position(grid.width / 2.0, grid.height / 2.0)
    assignment = SpawnAssignment(
        p1_region="R1",
        p2_region="R4",
        beacon_region="R5",
        friendly_positions=fp,
        enemy_positions=ep,
        beacon_position=Position(float(beacon[0]), float(beacon[1])),
        camera_initial=cam,
    )
    return make_world(grid, assignment, params)
