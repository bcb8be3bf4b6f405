"""Network structure metrics and distances between discrete distributions.

Graph arguments are dense symmetric matrices; any entry ``> 0`` is an edge
and the weight itself is ignored.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

SMOOTHING = 1e-10


def _binary(adj) -> np.ndarray:
    a = np.asarray(adj) > 0
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("adjacency must be a square matrix")
    a = a.copy()
    np.fill_diagonal(a, False)
    return a


def adjacency_from_edges(nodes: Sequence[int], edges) -> np.ndarray:
    """Boolean adjacency over ``nodes`` (in order) from ``(u, v[, w])`` tuples."""
    index = {v: i for i, v in enumerate(nodes)}
    a = np.zeros((len(nodes), len(nodes)), dtype=bool)
    for e in edges:
        i, j = index[e[0]], index[e[1]]
        if i != j:
            a[i, j] = a[j, i] = True
    return a


def degrees(adj) -> np.ndarray:
    return _binary(adj).sum(axis=1)


def clustering_coefficient(adj) -> Tuple[np.ndarray, float]:
    """Per-node ``2 E_i / (k_i (k_i - 1))`` (zero when ``k_i < 2``) and their mean."""
    a = _binary(adj).astype(np.int64)
    k = a.sum(axis=1)
    links = ((a @ a) * a).sum(axis=1) // 2
    pairs = k * (k - 1)
    c = np.divide(2.0 * links, pairs, out=np.zeros(len(k)), where=pairs > 0)
    return c, float(c.mean()) if len(c) else 0.0


def degree_distribution(adj) -> Tuple[np.ndarray, np.ndarray]:
    k = degrees(adj)
    if k.size == 0:
        raise ValueError("empty graph has no degree distribution")
    support, counts = np.unique(k, return_counts=True)
    return support, counts / k.size


@dataclass
class JointDegreeDistribution:
    degrees: np.ndarray
    P: np.ndarray

    def as_dict(self) -> Dict[Tuple[int, int], float]:
        out = {}
        for a, j in enumerate(self.degrees):
            for b, k in enumerate(self.degrees):
                if self.P[a, b] > 0:
                    out[(int(j), int(k))] = float(self.P[a, b])
        return out


def _edge_degrees(a: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    k = a.sum(axis=1)
    iu, ju = np.nonzero(np.triu(a, 1))
    return k[iu], k[ju]


def joint_degree_distribution(adj) -> JointDegreeDistribution:
    """``P(j, k) = m(j, k) mu(j, k) / (2M)``; symmetric, sums to one."""
    a = _binary(adj)
    dj, dk = _edge_degrees(a)
    m = dj.size
    if m == 0:
        raise ValueError("joint degree distribution undefined for an edgeless graph")
    support = np.unique(np.concatenate([dj, dk]))
    ix = np.searchsorted(support, dj)
    jx = np.searchsorted(support, dk)
    p = np.zeros((support.size, support.size))
    np.add.at(p, (ix, jx), 1.0)
    np.add.at(p, (jx, ix), 1.0)
    return JointDegreeDistribution(support, p / (2.0 * m))


def assortativity(adj) -> float:
    """Degree-degree Pearson correlation over both orientations of every edge.

    Returns ``nan`` when the end-degree variance is zero (e.g. regular graphs).
    """
    a = _binary(adj)
    dj, dk = _edge_degrees(a)
    if dj.size == 0:
        raise ValueError("assortativity undefined for an edgeless graph")
    x = np.concatenate([dj, dk]).astype(float)
    y = np.concatenate([dk, dj]).astype(float)
    x -= x.mean()
    y -= y.mean()
    den = np.sqrt((x * x).sum() * (y * y).sum())
    if den == 0:
        return float("nan")
    return float((x * y).sum() / den)


# --- distances between distributions --------------------------------------

def align(support_p, p, support_q, q) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Put two distributions on the union of their supports, padding with zeros."""
    support = np.union1d(support_p, support_q)
    pp = np.zeros(support.size)
    qq = np.zeros(support.size)
    pp[np.searchsorted(support, support_p)] = p
    qq[np.searchsorted(support, support_q)] = q
    return support, pp, qq


def _check(p, q) -> Tuple[np.ndarray, np.ndarray]:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"distributions not aligned: {p.shape} vs {q.shape}")
    return p, q


def _smooth(p: np.ndarray) -> np.ndarray:
    p = p + SMOOTHING
    return p / p.sum()


def kl_divergence(p, q) -> float:
    p, q = _check(p, q)
    p, q = _smooth(p), _smooth(q)
    return float(np.sum(p * np.log(p / q)))


def js_divergence(p, q) -> float:
    p, q = _check(p, q)
    p, q = _smooth(p), _smooth(q)
    m = 0.5 * (p + q)
    return float(0.5 * np.sum(p * np.log(p / m)) + 0.5 * np.sum(q * np.log(q / m)))


def pearson(p, q) -> float:
    p, q = _check(p, q)
    x = p - p.mean()
    y = q - q.mean()
    den = np.sqrt((x * x).sum() * (y * y).sum())
    return float((x * y).sum() / den) if den > 0 else float("nan")


def cosine(p, q) -> float:
    p, q = _check(p, q)
    den = np.linalg.norm(p) * np.linalg.norm(q)
    return float(p @ q / den) if den > 0 else float("nan")


# --- population-level quantities -------------------------------------------

def n_c(cell_counts, top: int = 4) -> int:
    """Summed occupancy of the ``top`` most populated cells."""
    c = np.asarray(cell_counts)
    if c.size <= top:
        return int(c.sum())
    return int(np.partition(c, c.size - top)[-top:].sum())


def cooperation_fraction(strategies) -> float:
    s = np.asarray(strategies)
    return float(np.mean(s == 0)) if s.size else 0.0


def state_transition_ratio(prev_locations, new_locations) -> float:
    a = np.asarray(prev_locations)
    b = np.asarray(new_locations)
    return float(np.mean(a != b)) if a.size else 0.0
