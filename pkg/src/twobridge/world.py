"""Two-bridge terrain: grid construction, spawn regions, pathfinding.

The map is a 64x64 cell grid split by a vertical cliff with exactly two
passable bridges.  Six 10x10 spawn regions sit well clear of the cliff,
three per side.  Positions are continuous; a unit occupies the cell
containing its position.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import ImpassableStartError

MAP_SIZE = 64
CLIFF_COLUMN_RANGE = (31, 33)  # half-open column interval occupied by the cliff
BRIDGE_ROW_RANGES = ((20, 23), (41, 44))  # half-open row intervals of the bridges

REGION_SIZE = 10
_REGION_X = {"left": 6, "right": 48}
_REGION_Y = (6, 27, 48)

DIRECTIONS = ("N", "S", "W", "E", "NE", "NW", "SE", "SW")


class Position(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Region:
    """Axis-aligned spawn rectangle, bounds half-open in cell coordinates."""

    id: str
    bounds: tuple[int, int, int, int]  # (x0, y0, x1, y1)
    side: str  # "left" | "right"

    @property
    def center(self) -> Position:
        x0, y0, x1, y1 = self.bounds
        return Position((x0 + x1) / 2.0, (y0 + y1) / 2.0)

    def contains(self, p: tuple[float, float]) -> bool:
        x0, y0, x1, y1 = self.bounds
        return x0 <= p[0] < x1 and y0 <= p[1] < y1


@dataclass
class TerrainGrid:
    """Immutable after construction; shared by every episode on the map."""

    width: int
    height: int
    passable: np.ndarray  # uint8 (height, width), indexed [y, x]
    bridge_cells: tuple[frozenset, frozenset]
    cliff_column_range: tuple[int, int]
    edge_bits: np.ndarray = None  # uint8 (h*w,), legal-step bits per cell

    def __post_init__(self):
        if self.edge_bits is None:
            self.edge_bits = compute_edge_bits(self.passable)

    def in_bounds(self, x: float, y: float) -> bool:
        return 0.0 <= x < self.width and 0.0 <= y < self.height

    def cell_of(self, p: tuple[float, float]) -> tuple[int, int]:
        return int(np.floor(p[0])), int(np.floor(p[1]))

    def is_passable(self, p: tuple[float, float]) -> bool:
        if not self.in_bounds(p[0], p[1]):
            return False
        cx, cy = self.cell_of(p)
        return bool(self.passable[cy, cx])


def compute_edge_bits(passable: np.ndarray) -> np.ndarray:
    """Per-cell byte whose bit k says a step in compass direction k is legal:
    source and destination passable, destination in bounds, and for diagonal
    steps both adjacent cardinal cells passable (no corner cutting)."""
    h, w = passable.shape
    padded = np.zeros((h + 2, w + 2), dtype=bool)
    padded[1:-1, 1:-1] = passable.astype(bool)

    def shifted(dx: int, dy: int) -> np.ndarray:
        return padded[1 + dy : h + 1 + dy, 1 + dx : w + 1 + dx]

    base = padded[1:-1, 1:-1]
    bits = np.zeros((h, w), dtype=np.uint8)
    steps = ((0, -1), (0, 1), (-1, 0), (1, 0), (1, -1), (-1, -1), (1, 1), (-1, 1))
    for k, (dx, dy) in enumerate(steps):
        ok = base & shifted(dx, dy)
        if k >= 4:
            ok = ok & shifted(dx, 0) & shifted(0, dy)
        bits |= ok.astype(np.uint8) << k
    return np.ascontiguousarray(bits.reshape(-1))


def build_two_bridge_map() -> tuple[TerrainGrid, list[Region]]:
    """Construct the canonical map and its six regions (R1..R6, id order)."""
    passable = np.ones((MAP_SIZE, MAP_SIZE), dtype=np.uint8)
    c0, c1 = CLIFF_COLUMN_RANGE
    passable[:, c0:c1] = 0
    bridges = []
    for r0, r1 in BRIDGE_ROW_RANGES:
        passable[r0:r1, c0:c1] = 1
        bridges.append(
            frozenset((x, y) for x in range(c0, c1) for y in range(r0, r1))
        )
    grid = TerrainGrid(
        width=MAP_SIZE,
        height=MAP_SIZE,
        passable=passable,
        bridge_cells=(bridges[0], bridges[1]),
        cliff_column_range=CLIFF_COLUMN_RANGE,
    )
    regions = []
    rid = 1
    for side in ("left", "right"):
        x0 = _REGION_X[side]
        for y0 in _REGION_Y:
            regions.append(
                Region(
                    id=f"R{rid}",
                    bounds=(x0, y0, x0 + REGION_SIZE, y0 + REGION_SIZE),
                    side=side,
                )
            )
            rid += 1
    return grid, regions


_default: tuple[TerrainGrid, list[Region]] | None = None


def default_map() -> tuple[TerrainGrid, list[Region]]:
    """Shared read-only instance of the canonical map."""
    global _default
    if _default is None:
        _default = build_two_bridge_map()
    return _default


def find_path(
    grid: TerrainGrid, frm: tuple[float, float], to: tuple[float, float]
) -> list[Position] | None:
    """Shortest 8-connected path as waypoints: the exact start point followed
    by cell centers, ending in the cell containing `to`.

    Cardinal steps cost 1, diagonals sqrt(2); diagonal steps never cut
    corners.  Returns None iff `to` is unreachable.  Raises
    ImpassableStartError if `frm` is not a passable point.
    """
    if grid.width > MAP_SIZE or grid.height > MAP_SIZE:
        raise ValueError(f"pathfinding supports grids up to {MAP_SIZE}x{MAP_SIZE}")
    if not grid.is_passable(frm):
        raise ImpassableStartError(f"start point {frm!r} is not passable")
    if not grid.in_bounds(to[0], to[1]):
        return None
    sx, sy = grid.cell_of(frm)
    gx, gy = grid.cell_of(to)
    n = grid.width * grid.height
    buf = np.empty(n, dtype=np.int32)
    plen = _kernels.astar_cells(
        grid.passable,
        grid.edge_bits,
        sy * grid.width + sx,
        gy * grid.width + gx,
        buf,
        np.empty(n, dtype=np.int64),
        np.zeros(n, dtype=np.int32),
        np.zeros(n, dtype=np.int32),
        np.empty(n, dtype=np.int32),
        np.empty(8 * n, dtype=np.int64),
        np.zeros(1, dtype=np.int64),
    )
    if plen == 0:
        return None
    path = [Position(float(frm[0]), float(frm[1]))]
    for c in buf[1:plen]:
        path.append(Position(c % grid.width + 0.5, c // grid.width + 0.5))
    return path


def sample_point_in_region(region: Region, rng: np.random.Generator) -> Position:
    """Uniform continuous point inside the region rectangle."""
    x0, y0, x1, y1 = region.bounds
    return Position(float(rng.uniform(x0, x1)), float(rng.uniform(y0, y1)))


def nearest_passable_cell(grid: TerrainGrid, p: tuple[float, float]) -> tuple[int, int]:
    """Cell whose center is closest to p among passable cells; ties break on
    (y, x) scan order."""
    ys, xs = np.nonzero(grid.passable)
    cx = xs + 0.5
    cy = ys + 0.5
    d2 = (cx - p[0]) ** 2 + (cy - p[1]) ** 2
    k = int(np.argmin(d2))
    return int(xs[k]), int(ys[k])


def grid_to_text(grid: TerrainGrid, regions: list[Region] | None = None) -> str:
    """ASCII rendering: '#' cliff, 'B' bridge, region digit, '.' open ground."""
    bridge = grid.bridge_cells[0] | grid.bridge_cells[1]
    rows = []
    for y in range(grid.height):
        row = []
        for x in range(grid.width):
            ch = "." if grid.passable[y, x] else "#"
            if (x, y) in bridge:
                ch = "B"
            elif regions:
                for r in regions:
                    if r.contains((x + 0.5, y + 0.5)):
                        ch = r.id[1]
                        break
            row.append(ch)
        rows.append("".join(row))
    return "\n".join(rows)
