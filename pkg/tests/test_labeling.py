"""Separator-portal labels: approximation window, entry budgets, spacing."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plado.graph import EmbeddingError, PlanarGraph, generate_planar
from plado.labeling import build_labeling

import oracles


def exact_rows(g, terms):
    el = oracles.edge_list(g)
    return {int(t): oracles.dijkstra_heap(g.n, el, int(t)) for t in terms}


def test_eps_must_be_positive():
    g = generate_planar(20, seed=0)
    with pytest.raises(ValueError, match="eps"):
        build_labeling(g, [0, 1], 0.0)
    with pytest.raises(ValueError, match="eps"):
        build_labeling(g, [0, 1], -0.5)


def test_terminal_range_checked():
    g = generate_planar(20, seed=0)
    with pytest.raises(ValueError, match="range"):
        build_labeling(g, [0, 25], 1.0)
    with pytest.raises(ValueError, match="range"):
        build_labeling(g, [-1], 1.0)


def test_empty_terminal_set():
    g = generate_planar(20, seed=0)
    lab = build_labeling(g, [], 1.0)
    assert lab.terminals == []


def test_single_terminal_self_query():
    g = generate_planar(30, seed=1)
    lab = build_labeling(g, [7], 1.0)
    assert lab.terminals == [7]
    assert lab.query(7, 7) == 0.0


def test_unlabeled_vertex_rejected():
    g = generate_planar(30, seed=1)
    lab = build_labeling(g, [0, 2, 4], 1.0)
    with pytest.raises(ValueError, match="no label"):
        lab.query(1, 2)


def test_disconnected_graph_rejected():
    # two components fail the genus check before any labeling happens
    g = PlanarGraph(4, [(0, 1, 1.0), (2, 3, 1.0)])
    with pytest.raises(EmbeddingError):
        build_labeling(g, [0, 3], 1.0)


def test_self_distance_zero():
    g = generate_planar(60, seed=2)
    lab = build_labeling(g, list(range(0, 60, 5)), 1.0)
    for u in lab.terminals:
        assert lab.query(u, u) == 0.0


def test_factor_two_at_eps_one():
    # all terminal pairs land in [d, 2d] against the heap oracle
    g = generate_planar(300, seed=5, weight_model="uniform")
    S = list(range(0, 300, 3))
    lab = build_labeling(g, S, 1.0)
    rows = exact_rows(g, S)
    for u in S:
        du = rows[u]
        for v in S:
            if u == v:
                continue
            got = lab.query(u, v)
            assert got >= du[v] - 1e-9
            assert got <= 2.0 * du[v] + 1e-9


@pytest.mark.parametrize("eps", [0.5, 0.25])
def test_tighter_eps_tightens_the_window(eps):
    g = generate_planar(150, seed=9, weight_model="uniform")
    S = list(range(0, 150, 3))
    lab = build_labeling(g, S, eps)
    rows = exact_rows(g, S)
    for u in S:
        du = rows[u]
        for v in S:
            if u == v:
                continue
            got = lab.query(u, v)
            assert got >= du[v] - 1e-9
            assert got <= (1.0 + eps) * du[v] + 1e-9


def test_portal_spacing_on_every_path():
    # consecutive portals sit at most eps * (path length) apart, except
    # where two consecutive path vertices already exceed that gap
    eps = 0.5
    g = generate_planar(200, seed=11, weight_model="uniform")
    lab = build_labeling(g, list(range(0, 200, 4)), eps)
    for u in lab.terminals:
        for ps in lab.labels[u]:
            if len(ps.pos) < 2:
                continue
            limit = eps * (ps.pos[-1] - ps.pos[0])
            gaps = np.diff(ps.pos)
            adjacent = np.diff(ps.pidx) == 1
            assert np.all((gaps <= limit + 1e-9) | adjacent)


@pytest.mark.parametrize("eps", [1.0, 0.5, 0.25])
def test_entry_budget(eps):
    g = generate_planar(220, seed=13)
    S = list(range(0, 220, 2))
    lab = build_labeling(g, S, eps)
    cap = 64 * max(1, lab.depth) * math.ceil(1.0 / eps)
    for u in S:
        assert lab.entry_count(u) <= cap


def test_entries_flat_view():
    g = generate_planar(100, seed=3)
    S = list(range(0, 100, 4))
    lab = build_labeling(g, S, 1.0)
    for u in S:
        ents = lab.entries(u)
        assert len(ents) == lab.entry_count(u)
        for level, portal, dist in ents:
            assert 0 <= level <= lab.depth
            assert 0 <= portal < lab.stau.gd.n
            assert dist >= 0.0


def test_ledger_counts_labels():
    g = generate_planar(120, seed=7)
    lab = build_labeling(g, list(range(0, 120, 3)), 1.0)
    assert lab.ledger.total_bits > 0
    assert lab.ledger.words("labels") > 0


def test_route_matches_query_value():
    g = generate_planar(180, seed=17, weight_model="uniform")
    S = list(range(0, 180, 5))
    lab = build_labeling(g, S, 1.0)
    rng = np.random.default_rng(0)
    for _ in range(60):
        u, v = (int(S[i]) for i in rng.integers(0, len(S), 2))
        if u == v:
            continue
        val, win = lab.query_detail(u, v)
        edges = lab.route_edges(u, v)
        total = sum(lab.g.edges[e].w for e in edges)
        assert abs(total - val) <= 1e-6 * max(1.0, val)
        heavies = lab.heavy_edges(win)
        assert max(lab.g.edges[e].w for e in heavies) == max(
            lab.g.edges[e].w for e in edges
        )


@settings(max_examples=25, deadline=None)
@given(n=st.integers(4, 40), seed=st.integers(0, 10_000))
def test_never_underestimates(n, seed):
    g = generate_planar(n, seed=seed, weight_model="uniform")
    S = list(range(0, n, 2))
    lab = build_labeling(g, S, 1.0)
    rows = exact_rows(g, S)
    for u in S:
        for v in S:
            got = lab.query(u, v)
            want = rows[u][v]
            assert got >= want - 1e-9
            assert got <= 2.0 * want + 1e-9
