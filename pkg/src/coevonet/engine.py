"""Simulation driver: unit-time synchronous steps interleaved with birth/death events.

One step runs five phases over the living population:

1. every agent picks an action from its (frozen) Q-table and all moves apply at once;
2. tie weights are decayed / reinforced from the new co-location pattern;
3. payoffs are accumulated on the new graph;
4. every agent updates one Q entry;
5. every agent may imitate a random neighbour (Fermi rule).

With birth-death enabled, events are processed in continuous time and the
pending unit steps are caught up whenever the event clock passes them.
"""

from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from . import metrics
from .birth_death import BIRTH, advance, start_schedule
from .distributions import LifetimeDistribution, PowerLaw, make_rng
from .game import GAMES, accumulate_payoffs, edge_index, payoff_matrix, strategy_update
from .learning import q_update_batch, select_actions
from .world import World, apply_moves, on_birth, on_death, update_weights

log = logging.getLogger(__name__)

REWARD_MODES = ("cell_total", "own")
HEURISTIC_DECAY = 0.99


@dataclass(frozen=True)
class SimConfig:
    rows: int = 10
    cols: int = 10
    initial_per_cell: int = 3
    birth_death_enabled: bool = False
    lam: float = 3.0
    lifetime: LifetimeDistribution = PowerLaw(80.0, 5.0)
    delta: float = 0.9
    eta: float = 0.7
    gamma: float = 0.3
    game: str = "snowdrift"
    r: float = 0.2
    kappa: float = 0.1
    beta: float = 2.0
    tau: float = 1.0
    sigma: float = 0.9
    horizon: int = 5000
    seed: int = 0
    record_every: int = 1
    snapshot_steps: Tuple[int, ...] = ()
    reward_mode: str = "cell_total"

    def __post_init__(self):
        def need(ok, name, msg):
            if not ok:
                raise ValueError(f"{name} {msg}, got {getattr(self, name)!r}")

        need(self.rows >= 1, "rows", "must be >= 1")
        need(self.cols >= 1, "cols", "must be >= 1")
        need(self.initial_per_cell >= 0, "initial_per_cell", "must be >= 0")
        need(self.lam > 0, "lam", "must be > 0")
        need(0.0 <= self.delta <= 1.0, "delta", "must be in [0, 1]")
        need(0.0 < self.eta <= 1.0, "eta", "must be in (0, 1]")
        need(0.0 <= self.gamma < 1.0, "gamma", "must be in [0, 1)")
        need(self.game in GAMES, "game", f"must be one of {GAMES}")
        need(0.0 <= self.r <= 1.0, "r", "must be in [0, 1]")
        need(self.kappa > 0, "kappa", "must be > 0")
        need(self.beta > 1, "beta", "must be > 1")
        need(self.tau > 0, "tau", "must be > 0")
        need(self.sigma > 0, "sigma", "must be > 0")
        need(self.horizon >= 0, "horizon", "must be >= 0")
        need(self.record_every >= 1, "record_every", "must be >= 1")
        need(self.reward_mode in REWARD_MODES, "reward_mode", f"must be one of {REWARD_MODES}")

    @property
    def epsilon(self) -> float:
        return 1.0 - self.delta

    def replace(self, **kw) -> "SimConfig":
        return dataclasses.replace(self, **kw)


@dataclass
class Snapshot:
    step: int
    nodes: List[Tuple[int, int, int, int]]  # id, row, col, strategy
    edges: List[Tuple[int, int, float]]

    def adjacency(self) -> np.ndarray:
        return metrics.adjacency_from_edges([n[0] for n in self.nodes], self.edges)


@dataclass
class RunRecord:
    steps: List[int] = field(default_factory=list)
    population: List[int] = field(default_factory=list)
    coop_fraction: List[float] = field(default_factory=list)
    n_c: List[int] = field(default_factory=list)
    transition_ratio: List[float] = field(default_factory=list)
    snapshots: Dict[int, Snapshot] = field(default_factory=dict)
    births: int = 0
    deaths: int = 0

    def final_window(self, horizon: int, fraction: float = 0.1) -> np.ndarray:
        """Mask of recorded rows inside the last ``fraction`` of the horizon (step 0 excluded)."""
        steps = np.asarray(self.steps)
        if horizon == 0:
            return steps == 0
        start = horizon - max(1, int(round(fraction * horizon)))
        return steps > start

    def summary(self, horizon: int) -> dict:
        m = self.final_window(horizon)
        out = {}
        for key in ("population", "coop_fraction", "n_c", "transition_ratio"):
            vals = np.asarray(getattr(self, key), dtype=float)[m]
            out[f"mean_{key}"] = float(vals.mean()) if vals.size else 0.0
        out["final_step"] = int(self.steps[-1]) if self.steps else 0
        out["window_steps"] = int(m.sum())
        out["births"] = self.births
        out["deaths"] = self.deaths
        return out


class Simulation:
    """Mutable state of one run. ``heuristic=True`` swaps Q-learning for the decaying-epsilon hill climber."""

    def __init__(self, config: SimConfig, heuristic: bool = False):
        self.config = config
        self.heuristic = heuristic
        self.rng = make_rng(config.seed)
        self.world = World(config.rows, config.cols, capacity=max(64, config.rows * config.cols * max(config.initial_per_cell, 1)))
        self.matrix = payoff_matrix(config.game, config.r)
        self.t = 0
        self.t_now = 0.0
        self.record = RunRecord()
        self.payoffs = np.zeros(0)
        self._last_transition = 0.0
        self._started = False
        if config.birth_death_enabled:
            self.schedule = start_schedule(config.lam, self.rng)
        else:
            self.schedule = None
            self._place_initial()
        self._record()

    # --- setup -----------------------------------------------------------

    def _place_initial(self) -> None:
        cfg = self.config
        ident = 0
        for cell in range(cfg.rows * cfg.cols):
            for _ in range(cfg.initial_per_cell):
                self.world.add(ident, cell, int(self.rng.integers(0, 2)))
                ident += 1
        self.world.connect_all(cfg.tau)
        self.payoffs = self._payoffs()
        self._started = True

    def _payoffs(self, edges=None) -> np.ndarray:
        return accumulate_payoffs(self.world.W, self.world.strategies, self.matrix, edges)

    def _cell_totals(self) -> np.ndarray:
        w = self.world
        return np.bincount(w.locations, weights=self.payoffs, minlength=w.n_cells)

    # --- one unit step ---------------------------------------------------

    def step(self) -> None:
        cfg = self.config
        w = self.world
        if not self._started:
            # first cohort of a birth-death run starts fully connected
            w.connect_all(cfg.tau)
            self.payoffs = self._payoffs()
            self._started = True
        n = w.n
        prev = w.locations.copy()
        if n:
            if self.heuristic:
                new = self._heuristic_moves(prev)
            else:
                rows = w.qtables[np.arange(n), prev]
                actions = select_actions(rows, cfg.delta, self.rng)
                new = apply_moves(cfg.rows, cfg.cols, prev, actions, self.rng)
            w.loc[:n] = new
            update_weights(w.W, new, cfg.beta, cfg.tau, cfg.sigma)
            edges = edge_index(w.W)
            self.payoffs = self._payoffs(edges)
            if not self.heuristic:
                if cfg.reward_mode == "cell_total":
                    reward = self._cell_totals()[new]
                else:
                    reward = self.payoffs
                q_update_batch(w.qtables, prev, actions, reward, new, cfg.eta, cfg.gamma)
            w.strategy[:n] = strategy_update(w.W, w.strategies, self.payoffs, cfg.kappa, self.rng, edges)
            self._last_transition = metrics.state_transition_ratio(prev, new)
        else:
            self.payoffs = np.zeros(0)
            self._last_transition = 0.0
        self.t += 1
        self._record()

    def _heuristic_moves(self, locs: np.ndarray) -> np.ndarray:
        cfg = self.config
        eps = HEURISTIC_DECAY**self.t
        totals = self._cell_totals()
        nbrs = _neighbor_table(cfg.rows, cfg.cols)[locs]
        vals = np.where(nbrs >= 0, totals[np.maximum(nbrs, 0)], -np.inf)
        best = np.argmax(vals, axis=1)
        best_loc = nbrs[np.arange(len(locs)), best]
        better = vals[np.arange(len(locs)), best] > totals[locs]
        explore = self.rng.random(len(locs)) < eps
        return np.where(explore & better, best_loc, locs)

    # --- recording -------------------------------------------------------

    def _record(self) -> None:
        cfg = self.config
        if self.t % cfg.record_every == 0 or self.t == cfg.horizon:
            w = self.world
            rec = self.record
            rec.steps.append(self.t)
            rec.population.append(w.n)
            rec.coop_fraction.append(metrics.cooperation_fraction(w.strategies))
            rec.n_c.append(metrics.n_c(w.occupancy()))
            rec.transition_ratio.append(self._last_transition)
        if self.t in cfg.snapshot_steps:
            self.record.snapshots[self.t] = self.snapshot()

    def snapshot(self) -> Snapshot:
        w = self.world
        nodes = []
        for i in range(w.n):
            r, c = divmod(int(w.loc[i]), w.cols)
            nodes.append((int(w.ids[i]), r, c, int(w.strategy[i])))
        return Snapshot(self.t, nodes, w.edges())

    # --- drivers ---------------------------------------------------------

    def run(self) -> RunRecord:
        cfg = self.config
        if self.schedule is None:
            while self.t < cfg.horizon:
                self.step()
            return self.record
        while True:
            while self.t < min(self.t_now, cfg.horizon):
                self.step()
            if self.t >= cfg.horizon:
                break
            ev = advance(self.schedule, self.t_now, cfg.lam, cfg.lifetime, self.rng)
            self.t_now = ev.time
            if ev.kind == BIRTH:
                on_birth(self.world, ev.individual_id, cfg.tau, self.rng)
                self.record.births += 1
            else:
                on_death(self.world, ev.individual_id)
                self.record.deaths += 1
        return self.record


_NEIGHBOR_CACHE: Dict[Tuple[int, int], np.ndarray] = {}


def _neighbor_table(rows: int, cols: int) -> np.ndarray:
    """``(cells, 4)`` grid neighbours in ascending index order, ``-1`` padded."""
    key = (rows, cols)
    if key not in _NEIGHBOR_CACHE:
        tab = np.full((rows * cols, 4), -1, dtype=np.int64)
        for cell in range(rows * cols):
            r, c = divmod(cell, cols)
            cand = [(r - 1, c), (r, c - 1), (r, c + 1), (r + 1, c)]
            nb = [rr * cols + cc for rr, cc in cand if 0 <= rr < rows and 0 <= cc < cols]
            tab[cell, : len(nb)] = nb
        _NEIGHBOR_CACHE[key] = tab
    return _NEIGHBOR_CACHE[key]


def run(config: SimConfig) -> RunRecord:
    return Simulation(config).run()


def run_heuristic(config: SimConfig) -> RunRecord:
    return Simulation(config, heuristic=True).run()


def heuristic_epsilon(step: int) -> float:
    return HEURISTIC_DECAY**step


@dataclass
class SweepResult:
    deltas: np.ndarray
    rs: np.ndarray
    replicas: int
    mean_coop: np.ndarray
    mean_nc: np.ndarray

    def rows(self):
        for a, d in enumerate(self.deltas):
            for b, r in enumerate(self.rs):
                yield float(d), float(r), float(self.mean_coop[a, b]), float(self.mean_nc[a, b])


def _summary_of(config: SimConfig) -> dict:
    return run(config).summary(config.horizon)


def sweep(
    config: SimConfig,
    deltas: Sequence[float],
    rs: Sequence[float],
    replicas: int = 1,
    workers: int = 1,
) -> SweepResult:
    """Average final-window cooperation and N_c over ``replicas`` seeds per (delta, r).

    Replica ``i`` uses seed ``config.seed + i`` in every cell, so results do
    not depend on execution order or worker count.
    """
    if replicas < 1:
        raise ValueError(f"replicas must be >= 1, got {replicas}")
    deltas = np.asarray(deltas, dtype=float)
    rs = np.asarray(rs, dtype=float)
    jobs = [
        (a, b, config.replace(delta=float(d), r=float(r), seed=config.seed + i, snapshot_steps=()))
        for a, d in enumerate(deltas)
        for b, r in enumerate(rs)
        for i in range(replicas)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_summary_of, [j[2] for j in jobs]))
    else:
        results = [_summary_of(j[2]) for j in jobs]
    coop = np.zeros((deltas.size, rs.size))
    nc = np.zeros((deltas.size, rs.size))
    for (a, b, _), res in zip(jobs, results):
        coop[a, b] += res["mean_coop_fraction"] / replicas
        nc[a, b] += res["mean_n_c"] / replicas
    return SweepResult(deltas, rs, replicas, coop, nc)
