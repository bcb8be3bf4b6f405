"""Brute-force reference implementations, written as plain loops over nodes and edges."""

import itertools
import math
from collections import Counter

import numpy as np


def random_graph(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 13))
    a = np.triu(rng.random((n, n)) < rng.uniform(0.1, 0.9), 1)
    return a | a.T


def edges(a):
    return [(i, j) for i in range(len(a)) for j in range(i + 1, len(a)) if a[i, j]]


def clustering(a):
    n = len(a)
    out = []
    for i in range(n):
        nb = [j for j in range(n) if a[i, j]]
        k = len(nb)
        if k < 2:
            out.append(0.0)
            continue
        links = sum(1 for x, y in itertools.combinations(nb, 2) if a[x, y])
        out.append(2 * links / (k * (k - 1)))
    return out


def joint_degree(a):
    """``{(j, k): P}`` with both orderings of every unordered degree pair present."""
    deg = [int(sum(row)) for row in a]
    es = edges(a)
    m = Counter(tuple(sorted((deg[i], deg[j]))) for i, j in es)
    out = {}
    for (j, k), cnt in m.items():
        mu = 2 if j == k else 1
        out[(j, k)] = out[(k, j)] = cnt * mu / (2 * len(es))
    return out


def assortativity(a):
    deg = [int(sum(row)) for row in a]
    xs, ys = [], []
    for i, j in edges(a):
        xs += [deg[i], deg[j]]
        ys += [deg[j], deg[i]]
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    cov = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    vx = sum((x - mx) ** 2 for x in xs)
    vy = sum((y - my) ** 2 for y in ys)
    return float("nan") if vx * vy == 0 else cov / math.sqrt(vx * vy)


def top4(occupancy):
    return sum(sorted(int(v) for v in occupancy)[::-1][:4])
