"""Weak nets, well separate decompositions, and sparse covers, checked
against exact distances from the independent oracles."""

import re

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plado.covers import (
    ComponentSplitError,
    decompose,
    sparse_cover,
    weak_net,
)
from plado.graph import generate_planar

import oracles


def max_weight(g):
    return max(e.w for e in g.edges)


def terminal_distance_rows(g, terms):
    el = oracles.edge_list(g)
    return {int(t): oracles.dijkstra_heap(g.n, el, int(t)) for t in terms}


# ---------------------------------------------------------------------------
# decompose
# ---------------------------------------------------------------------------


def test_decompose_rejects_heavy_edges():
    g = generate_planar(30, seed=1, weight_model="uniform")
    with pytest.raises(ValueError, match="heavier"):
        decompose(g, [0], r=max_weight(g) / 2)


def test_decompose_rejects_disconnected():
    g = generate_planar(20, seed=2, weight_model="uniform")
    e = g.edges[0]
    other = next(v for v in range(g.n) if v not in (e.u, e.v))
    with pytest.raises(ComponentSplitError):
        decompose(g, [], r=e.w, edges=[0], verts=[e.u, e.v, other])


def test_decompose_empty_terminals():
    g = generate_planar(40, seed=3, weight_model="uniform")
    wsd = decompose(g, [], r=max_weight(g) * 1.1)
    assert all(len(t.terminals) == 0 and t.assign == {} for t in wsd.triples)
    cores = np.concatenate([t.core for t in wsd.triples])
    assert len(cores) == g.n and np.array_equal(np.sort(cores), np.arange(g.n))
    net = weak_net(g, [], r=max_weight(g) * 1.1)
    assert len(net.points) == 0 and net.assign == {}


def test_decompose_single_terminal():
    g = generate_planar(40, seed=3, weight_model="uniform")
    wsd = decompose(g, [7], r=max_weight(g) * 1.1)
    withk = [t for t in wsd.triples if len(t.terminals)]
    assert len(withk) == 1
    (t,) = withk
    assert t.terminals.tolist() == [7]
    assert list(t.assign) == [7] and t.assign[7].tolist() == [7]


def test_decompose_close_terminals_share_triple():
    g = generate_planar(50, seed=4, weight_model="unit")
    e = g.edges[0]
    r = 4.0
    wsd = decompose(g, [e.u, e.v], r=r)
    hosts = [t for t in wsd.triples if len(t.terminals)]
    assert len(hosts) == 1, "terminals closer than r must share a triple"
    assert set(hosts[0].terminals.tolist()) == {e.u, e.v}


def test_decompose_separation_exhaustive():
    g = generate_planar(80, seed=5, weight_model="uniform")
    r = max_weight(g) * 1.05
    terms = np.arange(0, g.n, 4)
    wsd = decompose(g, terms, r=r)
    rows = terminal_distance_rows(g, terms)
    ksets = [t.terminals for t in wsd.triples if len(t.terminals)]
    assert len(ksets) >= 2, "want a multi-triple instance"
    for i in range(len(ksets)):
        for j in range(i + 1, len(ksets)):
            cross = min(rows[int(a)][int(b)]
                        for a in ksets[i] for b in ksets[j])
            assert cross >= r


def test_decompose_assignment_partition():
    g = generate_planar(80, seed=5, weight_model="uniform")
    terms = np.arange(0, g.n, 4)
    wsd = decompose(g, terms, r=max_weight(g) * 1.05)
    buckets = []
    for t in wsd.triples:
        assert sorted(t.assign) == t.terminals.tolist()
        buckets.extend(a for a in t.assign.values())
    flat = np.sort(np.concatenate(buckets)) if buckets else np.empty(0)
    assert np.array_equal(flat, terms), "assignments must partition K"


def test_decompose_recursion_depth():
    g = generate_planar(40, seed=6, weight_model="uniform")
    wsd = decompose(g, [0, 11], r=max_weight(g) * 1.1)
    assert wsd.triples and all(t.level == 3 for t in wsd.triples)
    leaf = decompose(g, [0, 11], r=max_weight(g) * 1.1, level=3)
    assert len(leaf.triples) == 1 and leaf.triples[0].verts.shape == (g.n,)


def test_decompose_slicing_matches_oracle():
    g = generate_planar(60, seed=6, weight_model="unit")
    trace = {}
    decompose(g, [], r=2.0, trace=trace)
    dist = oracles.dijkstra_heap(g.n, oracles.edge_list(g), trace["root"])
    expected = np.array([int(d // 2.0) for d in dist])
    assert np.array_equal(trace["slice_of"], expected)
    seen = np.concatenate(list(trace["subcores"].values()))
    assert np.array_equal(np.sort(seen), np.arange(g.n))
    for j, members in trace["subcores"].items():
        assert np.array_equal(members, np.flatnonzero(expected == j))


def test_decompose_ball_nesting():
    g = generate_planar(70, seed=7, weight_model="uniform")
    r = max_weight(g) * 1.2
    wsd = decompose(g, np.arange(0, g.n, 6), r=r)
    el = oracles.edge_list(g)
    rng = np.random.default_rng(19)
    picks = [(t, int(v)) for t in wsd.triples for v in t.core]
    for t, v in [picks[i] for i in rng.choice(len(picks), 25, replace=False)]:
        dist = oracles.dijkstra_heap(g.n, el, v)
        ball = {u for u in range(g.n) if dist[u] <= r}
        assert ball <= set(t.verts.tolist()), \
            "level-3 core vertex ball must stay inside its leaf subgraph"


# ---------------------------------------------------------------------------
# weak_net
# ---------------------------------------------------------------------------


def test_weak_net_rejects_bad_radius():
    g = generate_planar(12, seed=8)
    for r in (0.0, -2.0):
        with pytest.raises(ValueError):
            weak_net(g, [1, 2], r)


def test_weak_net_single_terminal():
    g = generate_planar(25, seed=8, weight_model="uniform")
    net = weak_net(g, [5], 0.5)
    assert net.points.tolist() == [5]
    assert net.assign[5].tolist() == [5]


def test_weak_net_all_close_collapses_to_one():
    g = generate_planar(14, seed=9, weight_model="unit")
    ap = oracles.all_pairs(g.n, oracles.edge_list(g))
    r = max(max(row) for row in ap) + 1.0
    assert all(ap[u][v] < r for u in range(g.n) for v in range(g.n))
    net = weak_net(g, np.arange(g.n), r)
    assert len(net.points) == 1
    x = int(net.points[0])
    assert np.array_equal(net.assign[x], np.arange(g.n))


def test_weak_net_survives_total_edge_deletion():
    g = generate_planar(30, seed=10, weight_model="uniform")
    minw = min(e.w for e in g.edges)
    r = minw * 0.9
    K = np.arange(0, g.n, 2)
    net = weak_net(g, K, r)
    assert np.array_equal(net.points, K), "isolated terminals net themselves"
    assert all(net.assign[int(x)].tolist() == [int(x)] for x in K)


def test_weak_net_separation_and_covering_n300():
    g = generate_planar(300, seed=11, weight_model="uniform")
    r = float(np.mean([e.w for e in g.edges]))
    K = np.arange(0, g.n, 3)
    net = weak_net(g, K, r)
    flat = np.sort(np.concatenate(list(net.assign.values())))
    assert np.array_equal(flat, K)
    el = oracles.edge_list(g)
    worst = 0.0
    pts = set(net.points.tolist())
    for x in net.points.tolist():
        dist = oracles.dijkstra_heap(g.n, el, x)
        for y in pts:
            if y != x:
                assert dist[y] >= r
        reach = max(dist[int(z)] for z in net.assign[x])
        worst = max(worst, reach)
        assert reach <= net.gamma * r
    print(f"measured covering radius {worst / r:.3f}r of allowed {net.gamma}r")


# ---------------------------------------------------------------------------
# sparse_cover
# ---------------------------------------------------------------------------


def test_sparse_cover_whole_graph_when_delta_large():
    g = generate_planar(40, seed=12, weight_model="uniform")
    ap = oracles.all_pairs(g.n, oracles.edge_list(g))
    diam = max(max(row) for row in ap)
    sc = sparse_cover(g, 1.5 * diam)
    assert sc.beta == 1.0 and sc.s == 1
    assert len(sc.clusters) == 1
    assert np.array_equal(sc.clusters[0], np.arange(g.n))
    assert np.all(sc.home == 0)


def test_sparse_cover_invariants():
    g = generate_planar(250, seed=13, weight_model="uniform")
    el = oracles.edge_list(g)
    ap = oracles.all_pairs(g.n, el)
    diam = max(max(row) for row in ap)
    delta = diam / 3.0
    sc = sparse_cover(g, delta)
    assert sc.beta >= 1.0 and (np.log2(sc.beta) % 1.0) == 0.0
    assert np.array_equal(np.sort(np.unique(np.concatenate(sc.clusters))),
                          np.arange(g.n))
    # ball of radius delta/beta sits inside the home cluster
    rad = delta / sc.beta
    for v in range(g.n):
        ball = {u for u in range(g.n) if ap[v][u] <= rad}
        assert ball <= set(sc.clusters[sc.home[v]].tolist())
    # exact diameters of the five biggest clusters, via the oracle
    order = sorted(range(len(sc.clusters)),
                   key=lambda i: -len(sc.clusters[i]))[:5]
    for ci in order:
        verts = sc.clusters[ci].tolist()
        inside = set(verts)
        sub = [(u, v, w) for u, v, w in el if u in inside and v in inside]
        idx = {v: i for i, v in enumerate(verts)}
        subl = [(idx[u], idx[v], w) for u, v, w in sub]
        worst = 0.0
        for s in range(len(verts)):
            worst = max(worst, max(oracles.dijkstra_heap(len(verts), subl, s)))
        assert worst <= delta


def test_sparse_cover_overlap_stays_bounded():
    worst = 0
    for seed in range(20):
        n = 50 + 7 * seed
        g = generate_planar(n, seed=100 + seed, weight_model="uniform")
        delta = 3.0 * float(np.mean([e.w for e in g.edges]))
        sc = sparse_cover(g, delta)
        worst = max(worst, sc.s)
        assert sc.s <= 40
    print(f"max cover overlap over 20 instances: {worst}")


def test_dump_and_stats_formats():
    g = generate_planar(40, seed=14, weight_model="uniform")
    wsd = decompose(g, [0, 9, 20], r=max_weight(g) * 1.1)
    lines = wsd.dump().splitlines()
    assert len(lines) == len(wsd.triples)
    assert all(re.fullmatch(r"\d+ \d+ \d+", ln) for ln in lines)
    sc = sparse_cover(g, 2.0)
    assert re.fullmatch(r"beta=\S+ s=\d+ delta=\S+", sc.stats_line())


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(8, 40),
       rexp=st.integers(-1, 2))
def test_weak_net_invariants_random(seed, n, rexp):
    g = generate_planar(n, seed=seed, weight_model="uniform")
    r = float(np.mean([e.w for e in g.edges])) * (2.0 ** rexp)
    K = np.arange(0, n, 2)
    net = weak_net(g, K, r)
    flat = np.sort(np.concatenate(list(net.assign.values())))
    assert np.array_equal(flat, K)
    ap = oracles.all_pairs(n, oracles.edge_list(g))
    pts = net.points.tolist()
    for i, x in enumerate(pts):
        for y in pts[i + 1:]:
            assert ap[x][y] >= r
        for z in net.assign[x].tolist():
            assert ap[x][z] <= net.gamma * r
