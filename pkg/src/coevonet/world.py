"""Grid positions, the co-location weight graph, and the living population.

The :class:`World` keeps every per-agent array dense over the living
individuals (slots ``0..n-1``). A death swaps the last slot into the hole,
so the weight matrix never carries dead rows.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, List, Tuple

import numpy as np

from .distributions import RandomSource
from .learning import N_ACTIONS, Action

# (drow, dcol) for LEFT, RIGHT, UP, DOWN, STAY; RANDOM_MOVE handled separately
_DR = np.array([0, 0, -1, 1, 0, 0])
_DC = np.array([-1, 1, 0, 0, 0, 0])


def apply_move(rows: int, cols: int, location: int, action: int, rng: RandomSource) -> int:
    return int(apply_moves(rows, cols, np.array([location]), np.array([action]), rng)[0])


def apply_moves(
    rows: int, cols: int, locations: np.ndarray, actions: np.ndarray, rng: RandomSource
) -> np.ndarray:
    """Apply one action per agent at once. Off-grid moves clamp to the current cell."""
    r, c = np.divmod(locations, cols)
    nr = r + _DR[actions]
    nc = c + _DC[actions]
    inside = (nr >= 0) & (nr < rows) & (nc >= 0) & (nc < cols)
    nr = np.where(inside, nr, r)
    nc = np.where(inside, nc, c)
    new = nr * cols + nc
    teleport = actions == Action.RANDOM_MOVE
    k = int(teleport.sum())
    if k:
        new = new.copy()
        new[teleport] = rng.integers(0, rows * cols, k)
    return new


def grid_neighbors(rows: int, cols: int, location: int) -> List[int]:
    r, c = divmod(location, cols)
    out = []
    for dr, dc in ((0, -1), (0, 1), (-1, 0), (1, 0)):
        rr, cc = r + dr, c + dc
        if 0 <= rr < rows and 0 <= cc < cols:
            out.append(rr * cols + cc)
    return out


def update_weights(
    w: np.ndarray, locations: np.ndarray, beta: float, tau: float, sigma: float
) -> None:
    """In-place tie update after everybody has moved.

    Every existing weight decays by ``beta``; co-located pairs gain ``tau``
    (a missing edge therefore starts at exactly ``tau``); anything left below
    ``sigma`` is dropped. A weight equal to ``sigma`` survives.
    """
    if not beta > 1:
        raise ValueError(f"beta must be > 1, got {beta}")
    w /= beta
    same = locations[:, None] == locations[None, :]
    np.fill_diagonal(same, False)
    np.add(w, tau, out=w, where=same)
    np.multiply(w, w >= sigma, out=w)


def occupancy(locations: np.ndarray, n_cells: int) -> np.ndarray:
    return np.bincount(locations, minlength=n_cells)


class World:
    """Living individuals, their cells, strategies, Q-tables and mutual weights."""

    def __init__(self, rows: int, cols: int, capacity: int = 64):
        if rows < 1 or cols < 1:
            raise ValueError("grid needs at least one row and one column")
        self.rows = rows
        self.cols = cols
        self.n = 0
        self._cap = 0
        self.ids = np.empty(0, dtype=np.int64)
        self.loc = np.empty(0, dtype=np.int64)
        self.strategy = np.empty(0, dtype=np.int64)
        self.q = np.empty((0, rows * cols, N_ACTIONS))
        self._w = np.empty((0, 0))
        self._slot = {}
        self._grow(max(capacity, 1))

    @property
    def n_cells(self) -> int:
        return self.rows * self.cols

    # dense views over the living population
    @property
    def W(self) -> np.ndarray:
        return self._w[: self.n, : self.n]

    @property
    def locations(self) -> np.ndarray:
        return self.loc[: self.n]

    @property
    def strategies(self) -> np.ndarray:
        return self.strategy[: self.n]

    @property
    def qtables(self) -> np.ndarray:
        return self.q[: self.n]

    @property
    def living_ids(self) -> np.ndarray:
        return self.ids[: self.n]

    def slot_of(self, ident: int) -> int:
        try:
            return self._slot[ident]
        except KeyError:
            raise KeyError(f"individual {ident} is not alive") from None

    def _grow(self, cap: int) -> None:
        old = self._cap
        self.ids = np.resize(self.ids, cap)
        self.loc = np.resize(self.loc, cap)
        self.strategy = np.resize(self.strategy, cap)
        q = np.zeros((cap, self.n_cells, N_ACTIONS))
        q[:old] = self.q[:old]
        self.q = q
        w = np.zeros((cap, cap))
        w[:old, :old] = self._w
        self._w = w
        self._cap = cap

    def add(self, ident: int, location: int, strategy: int) -> int:
        """Append a fresh individual (zero Q-table, no edges) and return its slot."""
        if ident in self._slot:
            raise ValueError(f"individual {ident} already alive")
        if self.n == self._cap:
            self._grow(2 * self._cap)
        i = self.n
        self.ids[i] = ident
        self.loc[i] = location
        self.strategy[i] = strategy
        self.q[i] = 0.0
        self._w[i, : i + 1] = 0.0
        self._w[: i + 1, i] = 0.0
        self._slot[ident] = i
        self.n += 1
        return i

    def remove(self, ident: int) -> None:
        """Delete an individual and all its edges; the last slot fills the hole."""
        i = self.slot_of(ident)
        last = self.n - 1
        if i != last:
            moved = int(self.ids[last])
            self.ids[i] = self.ids[last]
            self.loc[i] = self.loc[last]
            self.strategy[i] = self.strategy[last]
            self.q[i] = self.q[last]
            self._w[i, :] = self._w[last, :]
            self._w[:, i] = self._w[:, last]
            self._w[i, i] = 0.0
            self._slot[moved] = i
        self._w[last, : self.n] = 0.0
        self._w[: self.n, last] = 0.0
        del self._slot[ident]
        self.n -= 1

    def occupancy(self) -> np.ndarray:
        return occupancy(self.locations, self.n_cells)

    def connect_all(self, tau: float) -> None:
        """Complete graph over the current population, every weight ``tau``."""
        w = self.W
        w[:] = tau
        np.fill_diagonal(w, 0.0)

    def edges(self) -> List[Tuple[int, int, float]]:
        iu, ju = np.nonzero(np.triu(self.W, 1))
        ids = self.living_ids
        return [(int(ids[a]), int(ids[b]), float(self.W[a, b])) for a, b in zip(iu, ju)]

    def check(self) -> None:
        w = self.W
        assert np.array_equal(w, w.T), "weights not symmetric"
        assert not np.any(np.diag(w)), "self edge"
        assert np.all((w == 0) | (w > 0)), "negative weight"
        assert self.occupancy().sum() == self.n


def on_birth(world: World, ident: int, tau: float, rng: RandomSource) -> int:
    """Place a newborn in a uniform random cell, tied (weight ``tau``) to its cell mates."""
    location = int(rng.integers(0, world.n_cells))
    strategy = int(rng.integers(0, 2))
    mates = np.flatnonzero(world.locations == location)
    i = world.add(ident, location, strategy)
    world._w[i, mates] = tau
    world._w[mates, i] = tau
    return i


def on_death(world: World, ident: int) -> None:
    world.remove(ident)


def write_snapshot(world: World, out_dir: Path, step: int) -> Tuple[Path, Path]:
    nodes = []
    for i in range(world.n):
        r, c = divmod(int(world.loc[i]), world.cols)
        nodes.append((int(world.ids[i]), r, c, int(world.strategy[i])))
    return write_snapshot_files(out_dir, step, nodes, world.edges())


def write_snapshot_files(out_dir, step: int, nodes, edges) -> Tuple[Path, Path]:
    """Write ``edges_<step>.csv`` and ``nodes_<step>.csv``.

    ``nodes`` holds ``(id, row, col, strategy)`` and ``edges`` ``(src, dst, weight)``.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ep = out_dir / f"edges_{step:06d}.csv"
    npth = out_dir / f"nodes_{step:06d}.csv"
    with open(ep, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["src_id", "dst_id", "weight"])
        for a, b, wt in edges:
            wr.writerow([a, b, repr(float(wt))])
    with open(npth, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["id", "row", "col", "strategy"])
        for ident, r, c, s in nodes:
            wr.writerow([ident, r, c, "C" if s == 0 else "D"])
    return ep, npth


def read_edge_list(path) -> Tuple[List[int], List[Tuple[int, int, float]]]:
    """Parse an edge-list CSV (``src_id,dst_id[,weight]``)."""
    edges = []
    nodes = set()
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd, None)
        if header is None:
            return [], []
        start: Iterable = rd
        if header and header[0].strip().lstrip("-").isdigit():
            start = [header, *rd]
        for row in start:
            if not row or not row[0].strip():
                continue
            a, b = int(row[0]), int(row[1])
            wt = float(row[2]) if len(row) > 2 and row[2].strip() else 1.0
            edges.append((a, b, wt))
            nodes.update((a, b))
    return sorted(nodes), edges
