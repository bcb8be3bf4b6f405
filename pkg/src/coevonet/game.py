"""Two-strategy matrix games on a graph and Fermi-rule imitation.

Strategies are encoded as integers: 0 = cooperate, 1 = defect. Graphs are
dense symmetric adjacency (or weight) matrices; only ``> 0`` matters here.
"""

from __future__ import annotations

from typing import Tuple

import numpy as np
from scipy.special import expit

from .distributions import RandomSource

COOPERATE = 0
DEFECT = 1

GAMES = ("snowdrift", "staghunt")


def snowdrift(r: float) -> np.ndarray:
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"snowdrift r must be in [0, 1], got {r}")
    return np.array([[1.0, 1.0 - r], [1.0 + r, 0.0]])


def stag_hunt(r: float) -> np.ndarray:
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"stag hunt r must be in [0, 1], got {r}")
    return np.array([[1.0, -r], [r, 0.0]])


def payoff_matrix(game: str, r: float) -> np.ndarray:
    if game == "snowdrift":
        return snowdrift(r)
    if game == "staghunt":
        return stag_hunt(r)
    raise ValueError(f"game must be one of {GAMES}, got {game!r}")


def edge_index(adj: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Directed ``(src, dst)`` pairs for every nonzero entry, sorted by ``src``."""
    flat = np.flatnonzero(adj > 0)
    return np.divmod(flat, adj.shape[1])


def accumulate_payoffs(adj: np.ndarray, strategies: np.ndarray, m: np.ndarray, edges=None) -> np.ndarray:
    """Sum of ``m[s_i, s_j]`` over each node's neighbours; edge weights are ignored."""
    strategies = np.asarray(strategies)
    src, dst = edge_index(adj) if edges is None else edges
    return np.bincount(src, weights=m[strategies[src], strategies[dst]], minlength=strategies.shape[0])


def fermi_adopt_probability(u_i, u_j, kappa: float):
    """Probability that a player with payoff ``u_i`` copies one with ``u_j``."""
    kappa = np.asarray(kappa, dtype=float)
    if not np.all(kappa > 0):
        raise ValueError(f"kappa must be > 0, got {kappa}")
    return expit((np.asarray(u_j, dtype=float) - np.asarray(u_i, dtype=float)) / kappa)


def pick_random_neighbors(adj: np.ndarray, rng: RandomSource, edges=None) -> np.ndarray:
    """One uniformly chosen neighbour per node; ``-1`` for isolated nodes."""
    n = adj.shape[0]
    src, dst = edge_index(adj) if edges is None else edges
    deg = np.bincount(src, minlength=n)
    start = np.concatenate(([0], np.cumsum(deg)[:-1]))
    u = rng.random(n)
    pos = start + np.floor(u * deg).astype(np.int64)
    has = deg > 0
    out = np.full(n, -1, dtype=np.int64)
    out[has] = dst[pos[has]]
    return out


def strategy_update(
    adj: np.ndarray,
    strategies: np.ndarray,
    payoffs: np.ndarray,
    kappa: float,
    rng: RandomSource,
    edges=None,
) -> np.ndarray:
    """Synchronous Fermi imitation; returns a new strategy array."""
    strategies = np.asarray(strategies)
    n = strategies.shape[0]
    nb = pick_random_neighbors(adj, rng, edges)
    p = rng.random(n)
    has = nb >= 0
    safe = np.where(has, nb, 0)
    prob = fermi_adopt_probability(payoffs, payoffs[safe], kappa)
    adopt = has & (p < prob)
    return np.where(adopt, strategies[safe], strategies)
