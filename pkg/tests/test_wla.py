"""Weighted level ancestors: bottom-tree word lookups, centroid paths,
and the guard that rejects trees too deep for constant-time queries."""

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plado.wla import RootedTree, WLAStructure, build_wla, wla_query

import oracles


def random_tree(rng, n, chain_bias=0.0, wmax=6):
    par = [-1]
    wt = [0]
    for i in range(1, n):
        p = i - 1 if rng.random() < chain_bias else rng.randrange(i)
        par.append(p)
        wt.append(rng.randint(1, wmax))
    return par, wt


def wdepths(par, wt):
    d = [0] * len(par)
    for i in range(1, len(par)):
        d[i] = d[par[i]] + wt[i]
    return d


def test_depth_zero_returns_root():
    rng = random.Random(0)
    par, wt = random_tree(rng, 50)
    w = build_wla(RootedTree(par, wt))
    for v in range(50):
        assert wla_query(w, v, 0) == 0
        assert wla_query(w, v, -3) == 0


def test_query_at_own_depth_returns_self():
    rng = random.Random(1)
    par, wt = random_tree(rng, 80)
    w = build_wla(RootedTree(par, wt))
    dep = wdepths(par, wt)
    for v in range(80):
        assert wla_query(w, v, dep[v]) == v
        assert wla_query(w, v, dep[v] + 10) == v


def test_single_vertex():
    w = build_wla(RootedTree([-1], [0]))
    assert wla_query(w, 0, 0) == 0
    assert wla_query(w, 0, 100) == 0


def test_exhaustive_small_trees_match_naive_walk():
    rng = random.Random(7)
    for _ in range(40):
        n = rng.randint(1, 90)
        par, wt = random_tree(rng, n, chain_bias=rng.random() * 0.5)
        w = build_wla(RootedTree(par, wt))
        dep = wdepths(par, wt)
        top = max(dep) + 2
        for v in range(n):
            for d in range(0, top):
                got = wla_query(w, v, d)
                want = oracles.naive_weighted_ancestor(par, dep, v, d)
                assert got == want, (n, v, d)


def test_sampled_large_trees_match_naive_walk():
    rng = random.Random(13)
    for trial in range(6):
        n = 4000
        par, wt = random_tree(rng, n, chain_bias=0.3, wmax=9)
        w = build_wla(RootedTree(par, wt))
        dep = wdepths(par, wt)
        for _ in range(4000):
            v = rng.randrange(n)
            d = rng.randint(0, max(dep) + 1)
            assert wla_query(w, v, d) == \
                oracles.naive_weighted_ancestor(par, dep, v, d)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=2, max_value=60), st.integers())
def test_property_answer_is_deepest_legal_ancestor(n, seed):
    rng = random.Random(seed)
    par, wt = random_tree(rng, n, wmax=4)
    w = build_wla(RootedTree(par, wt))
    dep = wdepths(par, wt)
    v = rng.randrange(n)
    d = rng.randint(0, max(dep) + 1)
    a = wla_query(w, v, d)
    assert dep[a] <= d
    # a must be an ancestor-or-self of v
    x = v
    seen = False
    while x >= 0:
        if x == a:
            seen = True
        x = par[x]
    assert seen
    # and its child toward v, if any, must be too deep
    x = v
    prev = None
    while x != a:
        prev = x
        x = par[x]
    if prev is not None:
        assert dep[prev] > d


def test_deep_path_trips_the_guard():
    n = 2000
    par = [-1] + list(range(n - 1))
    wt = [0] + [1] * (n - 1)
    with pytest.raises(ValueError, match="hop depth"):
        build_wla(RootedTree(par, wt))


def test_zero_weight_rejected():
    with pytest.raises(ValueError, match="positive integers"):
        build_wla(RootedTree([-1, 0, 1], [0, 1, 0]))


def test_two_roots_rejected():
    with pytest.raises(ValueError, match="exactly one root"):
        build_wla(RootedTree([-1, -1, 0], [0, 1, 1]))


def test_cycle_rejected():
    with pytest.raises(ValueError, match="cycle"):
        build_wla(RootedTree([-1, 2, 1], [0, 1, 1]))


def test_bottom_trees_stay_word_sized():
    rng = random.Random(3)
    par, wt = random_tree(rng, 1500, chain_bias=0.2)
    w = build_wla(RootedTree(par, wt))
    assert all(len(vs) <= 64 for vs in w.flvert)
    # heavy set is nonempty on a tree this large
    assert w.constants["heavy"] >= 1
