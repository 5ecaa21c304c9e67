"""Planar core: embeddings, triangulation, SSSP, LCA, path maxima, formats."""

import math
import os

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from plado.graph import (
    INF,
    Edge,
    PlanarGraph,
    EmbeddingError,
    ceil_ratio,
    exact_distance,
    generate_planar,
    lca,
    load_graph,
    path_max_edge,
    save_graph,
    sssp,
    triangulate,
    SpaceLedger,
)

import oracles


def tiny_path():
    # a - b - c with weights 2, 3
    return PlanarGraph(3, [(0, 1, 2.0), (1, 2, 3.0)])


def test_sssp_path_graph():
    t = sssp(tiny_path(), 0)
    assert list(t.dist) == [0.0, 2.0, 5.0]
    assert t.parent[1] == 0 and t.parent[2] == 1


def test_sssp_matches_bellman_ford_random():
    g = generate_planar(200, seed=3, weight_model="uniform")
    t = sssp(g, 0)
    ref = oracles.bellman_ford(g.n, oracles.edge_list(g), 0)
    assert np.allclose(t.dist, ref)


def test_sssp_parent_edges_reconstruct_distances():
    g = generate_planar(80, seed=11)
    t = sssp(g, 5)
    for v in range(g.n):
        if v == 5:
            continue
        e = g.edges[t.parent_edge[v]]
        assert {e.u, e.v} == {v, int(t.parent[v])}
        assert t.dist[v] == t.dist[t.parent[v]] + e.w


def test_preorder_parents_first():
    g = generate_planar(120, seed=4)
    t = sssp(g, 0)
    pos = {int(v): i for i, v in enumerate(t.order)}
    for v in range(g.n):
        p = int(t.parent[v])
        if p >= 0:
            assert pos[p] < pos[v]
    assert len(set(map(int, t.order))) == g.n
    assert len(set(map(int, t.postorder))) == g.n


def test_triangle_fixed_point():
    g = PlanarGraph(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])
    gt = triangulate(g)
    assert gt.m == g.m
    assert all(len(f) == 3 for f in gt.face_cycles())


def test_triangulate_square_one_diagonal():
    # 4-cycle: exactly one pseudo diagonal is added
    edges = [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]
    rot = [[0, 7], [1, 2], [3, 4], [5, 6]]
    g = PlanarGraph(4, edges, rot)
    g.validate()
    g.check_euler()
    gt = triangulate(g)
    added = [e for e in gt.edges if e.pseudo]
    assert len(added) == 2  # one per square face (inner and outer walk)
    assert all(e.w == INF for e in added)
    assert all(len(f) == 3 for f in gt.face_cycles())
    # fan rule: both diagonals hang off the minimum face corner
    assert all(0 in (e.u, e.v) for e in added)


def test_triangulate_tree_ears():
    # path a-b-c: one face of walk length 4; ear clipping adds chord (a, c)
    g = tiny_path()
    gt = triangulate(g)
    gt.check_euler()
    assert all(len(f) <= 3 for f in gt.face_cycles())
    assert sum(e.pseudo for e in gt.edges) == 1


def test_triangulate_random_all_faces_triangular():
    for seed in (0, 1, 2):
        g = generate_planar(50, seed=seed)
        gt = triangulate(g)
        gt.validate()
        gt.check_euler()
        faces = oracles.trace_faces(
            gt.n, [(e.u, e.v) for e in gt.edges], gt.rotation
        )
        assert all(len(f) == 3 for f in faces)
        # real weights untouched
        for e, e0 in zip(gt.edges, g.edges):
            assert e.w == e0.w and not e.pseudo
        # shortest paths ignore pseudo edges entirely
        t0, t1 = sssp(g, 0), sssp(gt, 0)
        assert np.allclose(t0.dist, t1.dist)


def test_generator_deterministic_and_connected():
    a = generate_planar(60, seed=9)
    b = generate_planar(60, seed=9)
    assert [(e.u, e.v, e.w) for e in a.edges] == [(e.u, e.v, e.w) for e in b.edges]
    assert a.rotation == b.rotation
    comps = oracles.connected_components(a.n, oracles.edge_list(a))
    assert len(comps) == 1
    a.validate()
    a.check_euler()


def test_generator_weight_models():
    u = generate_planar(40, seed=1, weight_model="unit")
    assert all(e.w == 1.0 for e in u.edges)
    s = generate_planar(400, seed=1, weight_model="exponential-spread")
    ws = [e.w for e in s.edges]
    assert max(ws) / min(ws) > 2 ** 20  # genuinely wide spread at this n


def test_lca_against_naive():
    g = generate_planar(150, seed=7)
    t = sssp(g, 0)
    rng = np.random.default_rng(0)
    for _ in range(300):
        u, v = map(int, rng.integers(0, g.n, 2))
        assert lca(t, u, v) == oracles.naive_lca(list(t.parent), u, v)


def test_path_max_against_naive():
    g = generate_planar(150, seed=8)
    t = sssp(g, 3)
    weights = [e.w for e in g.edges]
    rng = np.random.default_rng(1)
    for _ in range(300):
        u, v = map(int, rng.integers(0, g.n, 2))
        if u == v:
            with pytest.raises(ValueError):
                path_max_edge(t, u, v, g=g)
            continue
        got = path_max_edge(t, u, v, g=g)
        want = oracles.naive_path_max(
            list(t.parent), list(t.parent_edge), weights, u, v
        )
        assert got == want


def test_path_max_simple_example():
    # path with weights 1, 9, 2: the weight-9 edge wins
    g = PlanarGraph(4, [(0, 1, 1.0), (1, 2, 9.0), (2, 3, 2.0)])
    t = sssp(g, 0)
    assert path_max_edge(t, 0, 3, g=g) == 1


@given(st.floats(0.0, 200.0), st.floats(0.05, 1e3))
@settings(max_examples=200, deadline=None)
def test_ceiling_modes_agree(d, w):
    from fractions import Fraction

    a = ceil_ratio(d, w, "native")
    b = ceil_ratio(d, w, "iterative")
    assert a == b  # both modes land on the exact minimal q
    assert a * Fraction(w) >= Fraction(d)
    if a > 0:
        assert (a - 1) * Fraction(w) < Fraction(d)


def test_ceiling_exact_multiples():
    assert ceil_ratio(6.0, 2.0) == 3
    assert ceil_ratio(6.0, 2.0, "iterative") == 3
    assert ceil_ratio(0.0, 5.0) == 0
    assert ceil_ratio(0.0, 5.0, "iterative") == 0
    assert ceil_ratio(6.1, 2.0) == 4


def test_graph_roundtrip(tmp_path):
    g = generate_planar(70, seed=5, weight_model="exponential-spread")
    p = os.path.join(tmp_path, "g.pg")
    save_graph(g, p)
    h = load_graph(p)
    assert h.n == g.n and h.m == g.m and h.directed == g.directed
    for a, b in zip(g.edges, h.edges):
        assert (a.u, a.v, a.pseudo) == (b.u, b.v, b.pseudo)
        assert a.w == b.w  # bit-exact
    assert h.rotation == g.rotation
    # second pass is byte-identical
    p2 = os.path.join(tmp_path, "g2.pg")
    save_graph(h, p2)
    assert open(p).read() == open(p2).read()


def test_graph_roundtrip_directed(tmp_path):
    g = generate_planar(40, seed=6, directed=True)
    p = os.path.join(tmp_path, "d.pg")
    save_graph(g, p)
    h = load_graph(p)
    assert h.directed
    assert h.rotation == g.rotation


def test_load_rejects_missing_rotations(tmp_path):
    p = os.path.join(tmp_path, "bad.pg")
    with open(p, "w") as f:
        f.write("pg 2 1\ne 0 1 1.0\n")
    with pytest.raises(ValueError):
        load_graph(p)


def test_exact_distance_and_disconnection():
    g = tiny_path()
    assert exact_distance(g, 0, 2) == 5.0
    assert exact_distance(g, 1, 1) == 0.0
    h = PlanarGraph(2, [])
    t = sssp(h, 0)
    assert t.dist[1] == INF


def test_directed_distances_asymmetric():
    g = PlanarGraph(3, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 10.0)], directed=True)
    assert exact_distance(g, 0, 2) == 2.0
    assert exact_distance(g, 2, 0) == 10.0
    ref = oracles.dijkstra_heap(3, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 10.0)],
                                2, directed=True)
    assert exact_distance(g, 2, 1) == ref[1]


def test_space_ledger_accounting():
    led = SpaceLedger()
    led.add("a", 65)
    led.add("a", 1)
    led.add("b", 64)
    assert led.total_bits == 130
    assert led.total_words == 3  # ceil(130/64)
    assert led.words("a") == 2
    sub = SpaceLedger()
    sub.add("x", 10)
    led.merge(sub, prefix="sub.")
    assert led.entries["sub.x"] == 10
    state = led.to_state()
    led2 = SpaceLedger.from_state(state)
    assert led2.total_bits == led.total_bits


def test_validate_catches_bad_rotation():
    g = PlanarGraph(2, [(0, 1, 1.0)], [[0, 1], []])
    with pytest.raises(EmbeddingError):
        g.validate()


def test_euler_check_catches_nonplanar_rotation():
    # K4 with a deliberately scrambled rotation at one vertex: genus != 0
    edges = [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0),
             (0, 3, 1.0), (1, 3, 1.0), (2, 3, 1.0)]
    good_rot = [[0, 6, 5], [2, 8, 1], [4, 10, 3], [7, 9, 11]]
    g = PlanarGraph(4, edges, good_rot)
    g.validate()
    g.check_euler()
    bad_rot = [[0, 5, 6], [2, 8, 1], [4, 10, 3], [7, 9, 11]]
    h = PlanarGraph(4, edges, bad_rot)
    h.validate()
    with pytest.raises(EmbeddingError):
        h.check_euler()
