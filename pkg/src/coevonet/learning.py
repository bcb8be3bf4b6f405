"""Tabular Q-learning over grid cells, plus the non-learning heuristic mover."""

from __future__ import annotations

import enum
from typing import Mapping

import numpy as np

from .distributions import RandomSource

N_ACTIONS = 6


class Action(enum.IntEnum):
    LEFT = 0
    RIGHT = 1
    UP = 2
    DOWN = 3
    STAY = 4
    RANDOM_MOVE = 5


def new_qtable(n_states: int) -> np.ndarray:
    return np.zeros((n_states, N_ACTIONS))


def select_action(q: np.ndarray, state: int, delta: float, rng: RandomSource) -> Action:
    """Epsilon-greedy choice: greedy with probability ``delta``, else uniform over all six."""
    a = select_actions(q[state][None, :], delta, rng)
    return Action(int(a[0]))


def select_actions(rows: np.ndarray, delta: float, rng: RandomSource) -> np.ndarray:
    """Vectorised epsilon-greedy over a stack of Q rows, shape ``(n, 6)``.

    Exact ties in the greedy branch are broken uniformly by giving every tied
    action an independent uniform key and taking the largest.
    """
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must be in [0, 1], got {delta}")
    n = rows.shape[0]
    exploit = rng.random(n) < delta
    keys = rng.random((n, N_ACTIONS))
    random_actions = rng.integers(0, N_ACTIONS, n)
    tied = rows == rows.max(axis=1, keepdims=True)
    greedy = np.argmax(np.where(tied, keys, -1.0), axis=1)
    return np.where(exploit, greedy, random_actions)


def q_update(
    q: np.ndarray,
    s: int,
    a: int,
    reward: float,
    s_next: int,
    eta: float,
    gamma: float,
) -> np.ndarray:
    """Return a copy of ``q`` with one Bellman step applied to entry ``(s, a)``."""
    out = q.copy()
    target = reward + gamma * q[s_next].max()
    out[s, a] = q[s, a] + eta * (target - q[s, a])
    return out


def q_update_batch(
    tables: np.ndarray,
    states: np.ndarray,
    actions: np.ndarray,
    rewards: np.ndarray,
    next_states: np.ndarray,
    eta: float,
    gamma: float,
) -> None:
    """In-place synchronous update of agent ``i``'s table ``tables[i]``.

    Every target is computed before any entry is written, so each max over
    the next state reads the pre-update table.
    """
    idx = np.arange(tables.shape[0])
    old = tables[idx, states, actions]
    target = rewards + gamma * tables[idx, next_states].max(axis=1)
    tables[idx, states, actions] = old + eta * (target - old)


def heuristic_step(
    location: int,
    epsilon: float,
    neighbor_payoffs: Mapping[int, float],
    current_payoff: float,
    rng: RandomSource,
) -> int:
    """Move to the best grid-adjacent cell with probability ``epsilon``, if strictly better."""
    if rng.random() >= epsilon or not neighbor_payoffs:
        return location
    best = max(neighbor_payoffs, key=lambda loc: (neighbor_payoffs[loc], -loc))
    return best if neighbor_payoffs[best] > current_payoff else location
