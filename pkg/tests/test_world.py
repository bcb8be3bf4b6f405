import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coevonet.distributions import make_rng
from coevonet.learning import Action
from coevonet.world import (
    World,
    apply_move,
    apply_moves,
    grid_neighbors,
    on_birth,
    on_death,
    read_edge_list,
    update_weights,
    write_snapshot,
)


def rc(loc, cols=10):
    return divmod(loc, cols)


def test_stay():
    assert apply_move(10, 10, 17, Action.STAY, make_rng(0)) == 17


def test_left_at_column_zero_clamps():
    assert apply_move(10, 10, 30, Action.LEFT, make_rng(0)) == 30


def test_up_index_arithmetic():
    assert rc(apply_move(10, 10, 3 * 10 + 5, Action.UP, make_rng(0))) == (2, 5)


@given(st.integers(1, 8), st.integers(1, 8), st.data())
def test_moves_match_coordinate_oracle(rows, cols, data):
    loc = data.draw(st.integers(0, rows * cols - 1))
    a = data.draw(st.sampled_from([Action.LEFT, Action.RIGHT, Action.UP, Action.DOWN, Action.STAY]))
    r, c = divmod(loc, cols)
    dr, dc = {Action.LEFT: (0, -1), Action.RIGHT: (0, 1), Action.UP: (-1, 0), Action.DOWN: (1, 0), Action.STAY: (0, 0)}[a]
    nr, nc = r + dr, c + dc
    expected = nr * cols + nc if 0 <= nr < rows and 0 <= nc < cols else loc
    assert apply_move(rows, cols, loc, a, make_rng(0)) == expected


def test_random_move_covers_grid_uniformly():
    n = 60000
    out = apply_moves(3, 4, np.zeros(n, int), np.full(n, int(Action.RANDOM_MOVE)), make_rng(1))
    f = np.bincount(out, minlength=12) / n
    assert np.all(np.abs(f - 1 / 12) < 0.01)


def test_grid_neighbors_corner_and_centre():
    assert sorted(grid_neighbors(10, 10, 0)) == [1, 10]
    assert sorted(grid_neighbors(10, 10, 55)) == [45, 54, 56, 65]


def test_fresh_colocated_edge_is_tau():
    w = np.zeros((2, 2))
    update_weights(w, np.array([4, 4]), 2.0, 1.0, 0.5)
    assert w[0, 1] == w[1, 0] == 1.0


def test_separated_edge_pruned():
    w = np.array([[0, 1.0], [1.0, 0]])
    update_weights(w, np.array([0, 1]), 2.0, 1.0, 0.6)
    assert w[0, 1] == 0 and w[1, 0] == 0


def test_colocated_edge_reinforced():
    w = np.array([[0, 1.0], [1.0, 0]])
    update_weights(w, np.array([3, 3]), 2.0, 1.0, 0.5)
    assert w[0, 1] == 1.5


def test_threshold_equality_retained():
    w = np.array([[0, 1.0], [1.0, 0]])
    update_weights(w, np.array([0, 1]), 2.0, 1.0, 0.5)
    assert w[0, 1] == 0.5


def test_beta_must_exceed_one():
    with pytest.raises(ValueError):
        update_weights(np.zeros((1, 1)), np.array([0]), 1.0, 1.0, 0.5)


def reference_update(w, loc, beta, tau, sigma):
    n = len(loc)
    out = np.zeros_like(w)
    for i, j in itertools.product(range(n), range(n)):
        if i == j:
            continue
        if loc[i] == loc[j]:
            v = tau if w[i, j] == 0 else w[i, j] / beta + tau
        else:
            v = w[i, j] / beta
        # the floor applies to every stored tie, reinforced or not
        out[i, j] = v if v >= sigma else 0.0
    return out


@given(st.integers(1, 9), st.integers(0, 2**32), st.floats(1.1, 4), st.floats(0.1, 2), st.floats(0.05, 1.5))
@settings(max_examples=100)
def test_update_matches_pairwise_rule(n, seed, beta, tau, sigma):
    rng = np.random.default_rng(seed)
    w = np.triu(rng.uniform(sigma, 3, (n, n)) * (rng.random((n, n)) < 0.5), 1)
    w = w + w.T
    loc = rng.integers(0, 4, n)
    expected = reference_update(w, loc, beta, tau, sigma)
    update_weights(w, loc, beta, tau, sigma)
    assert np.allclose(w, expected, rtol=0, atol=1e-12)
    assert np.array_equal(w, w.T)
    assert not np.any(np.diag(w))
    assert np.all((w == 0) | (w >= sigma))


def test_geometric_decay_without_reinforcement():
    w = np.array([[0, 3.0], [3.0, 0]])
    for k in range(1, 8):
        update_weights(w, np.array([0, 1]), 1.5, 1.0, 1e-6)
        assert w[0, 1] == pytest.approx(3.0 / 1.5**k, rel=1e-12)


def fresh_world(per_cell=0, rows=3, cols=3):
    w = World(rows, cols, capacity=2)
    ident = 0
    for cell in range(rows * cols):
        for _ in range(per_cell):
            w.add(ident, cell, ident % 2)
            ident += 1
    return w


def test_birth_into_empty_cell_has_no_edges():
    w = World(1, 1)
    on_birth(w, 0, 1.0, make_rng(0))
    assert w.edges() == []


def test_birth_links_to_every_cellmate():
    w = World(1, 1)
    for i in range(3):
        w.add(i, 0, 0)
    on_birth(w, 3, 1.0, make_rng(0))
    assert sorted(w.edges()) == [(0, 3, 1.0), (1, 3, 1.0), (2, 3, 1.0)]
    assert np.all(w.qtables[w.slot_of(3)] == 0)


def test_births_deterministic():
    def go():
        w = World(5, 5)
        rng = make_rng(42)
        for i in range(20):
            on_birth(w, i, 1.0, rng)
        return w.locations.copy(), w.strategies.copy()

    (a1, s1), (a2, s2) = go(), go()
    assert np.array_equal(a1, a2) and np.array_equal(s1, s2)


def test_remove_isolated_node_leaves_edges():
    w = fresh_world()
    for i in range(3):
        w.add(i, 0, 0)
    w._w[0, 1] = w._w[1, 0] = 1.0
    w.add(9, 4, 0)
    before = w.edges()
    on_death(w, 9)
    assert w.edges() == before and w.n == 3


def test_remove_star_hub():
    w = World(2, 2)
    for i in range(5):
        w.add(i, 0, 0)
    w._w[0, 1:5] = w._w[1:5, 0] = 1.0
    on_death(w, 0)
    assert w.edges() == [] and w.n == 4


def test_remove_unknown_id_rejected():
    with pytest.raises(KeyError, match="not alive"):
        on_death(World(2, 2), 5)


@given(st.lists(st.tuples(st.booleans(), st.integers(0, 30)), min_size=1, max_size=60), st.integers(0, 2**32))
@settings(max_examples=60, deadline=None)
def test_world_matches_dict_model(ops, seed):
    """Random births/deaths/rewiring agree with a dictionary-of-pairs reference."""
    rng = make_rng(seed)
    w = World(3, 3, capacity=1)
    ref_loc, ref_w = {}, {}
    next_id = 0
    for is_birth, k in ops:
        if is_birth or not ref_loc:
            slot = on_birth(w, next_id, 1.0, rng)
            loc = int(w.loc[slot])
            for other, ol in ref_loc.items():
                if ol == loc:
                    ref_w[frozenset((other, next_id))] = 1.0
            ref_loc[next_id] = loc
            next_id += 1
        else:
            victim = sorted(ref_loc)[k % len(ref_loc)]
            on_death(w, victim)
            del ref_loc[victim]
            ref_w = {e: v for e, v in ref_w.items() if victim not in e}
        if k % 3 == 0:
            new = np.array(make_rng(k).integers(0, 9, w.n))
            w.loc[: w.n] = new
            for i, ident in enumerate(w.living_ids):
                ref_loc[int(ident)] = int(new[i])
            update_weights(w.W, w.locations, 2.0, 1.0, 0.5)
            nxt = {}
            for a, b in itertools.combinations(sorted(ref_loc), 2):
                e = frozenset((a, b))
                old = ref_w.get(e, 0.0)
                if ref_loc[a] == ref_loc[b]:
                    nxt[e] = 1.0 if old == 0 else old / 2 + 1.0
                elif old and old / 2 >= 0.5:
                    nxt[e] = old / 2
            ref_w = nxt
        w.check()
        assert w.n == len(ref_loc)
        assert {frozenset((a, b)): v for a, b, v in w.edges()} == pytest.approx(ref_w)
        assert w.occupancy().sum() == w.n


def test_snapshot_round_trip(tmp_path):
    w = World(2, 3)
    for i in range(4):
        w.add(10 + i, i, i % 2)
    w._w[0, 2] = w._w[2, 0] = 1.25
    w._w[1, 3] = w._w[3, 1] = 0.5
    ep, npth = write_snapshot(w, tmp_path, 7)
    assert ep.name == "edges_000007.csv" and npth.name == "nodes_000007.csv"
    assert ep.read_text().splitlines()[0] == "src_id,dst_id,weight"
    assert npth.read_text().splitlines() == ["id,row,col,strategy", "10,0,0,C", "11,0,1,D", "12,0,2,C", "13,1,0,D"]
    nodes, edges = read_edge_list(ep)
    assert nodes == [10, 11, 12, 13]
    assert sorted(edges) == [(10, 12, 1.25), (11, 13, 0.5)]


def test_edge_list_without_header(tmp_path):
    p = tmp_path / "e.csv"
    p.write_text("1,2\n2,3,0.7\n")
    assert read_edge_list(p) == ([1, 2, 3], [(1, 2, 1.0), (2, 3, 0.7)])
