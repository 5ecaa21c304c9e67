"""Weighted level ancestors on static rooted trees.

Vertices with 65 or more descendants form a thin top tree; everything
else hangs below it in bottom trees of at most 64 vertices, small
enough that one machine word can mark any vertex subset.  The top tree
is cut into centroid paths by subtree-size rank, so every root path
crosses O(log n) of them.  A query either resolves inside one bottom
tree with a masked highest-bit lookup, or lands on one centroid path
after two binary searches and an Euler-tour ancestor test.

Edge weights must be positive integers: ancestors of a vertex then sit
at pairwise distinct weighted depths, which is what lets the bottom
trees answer with a single bit-scan.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np

from .graph import SpaceLedger

__all__ = ["RootedTree", "WLAStructure", "build_wla", "wla_query"]

WORD = 64


@dataclass
class RootedTree:
    """Plain parent-array tree; parent[root] < 0, weight[root] ignored."""

    parent: Sequence[int]
    weight: Sequence[int]


def _hop_guard(n: int) -> int:
    # generous polylog cap; a deeper tree would break the O(1) claim
    lg = max(1, math.ceil(math.log2(n + 1)))
    return max(WORD, 6 * lg * lg)


@dataclass
class WLAStructure:
    """Static ancestor index; query with :func:`wla_query`."""

    parent: np.ndarray
    depth: np.ndarray
    root: int
    tin: np.ndarray = field(repr=False)
    tout: np.ndarray = field(repr=False)
    # bottom forest; fid[v] < 0 marks top-tree vertices
    fid: np.ndarray = field(repr=False)
    froot: List[int] = field(repr=False)
    fldepth: List[List[int]] = field(repr=False)
    flvert: List[List[int]] = field(repr=False)
    fword: List[int] = field(repr=False)
    # centroid paths over the top tree
    leafptr: np.ndarray = field(repr=False)
    path_verts: List[List[int]] = field(repr=False)
    path_depths: List[List[int]] = field(repr=False)
    head_depths: Dict[int, List[int]] = field(repr=False)
    head_paths: Dict[int, List[int]] = field(repr=False)
    ledger: SpaceLedger = field(repr=False)
    constants: Dict[str, float] = field(repr=False)

    def query(self, v: int, d) -> int:
        return wla_query(self, v, d)


def build_wla(t) -> WLAStructure:
    """Index ``t`` (anything with integer ``parent``/``weight`` arrays)."""
    par = np.asarray(t.parent, dtype=np.int64)
    wt = np.asarray(t.weight, dtype=np.int64).copy()
    n = int(len(par))
    if n == 0:
        raise ValueError("tree is empty")
    if len(wt) != n:
        raise ValueError("parent and weight arrays disagree in length")
    roots = np.flatnonzero(par < 0)
    if len(roots) != 1:
        raise ValueError("tree must have exactly one root")
    root = int(roots[0])
    wt[root] = 0
    if n > 1 and int(wt[np.arange(n) != root].min()) < 1:
        raise ValueError("edge weights must be positive integers")

    kids: List[List[int]] = [[] for _ in range(n)]
    for v in range(n):
        if v == root:
            continue
        p = int(par[v])
        if not (0 <= p < n):
            raise ValueError("parent id out of range")
        kids[p].append(v)

    # breadth-first order doubles as a cycle check
    order = [root]
    hop = np.zeros(n, dtype=np.int64)
    depth = np.zeros(n, dtype=np.int64)
    for v in order:
        for c in kids[v]:
            hop[c] = hop[v] + 1
            depth[c] = depth[v] + wt[c]
            order.append(c)
    if len(order) != n:
        raise ValueError("parent links contain a cycle")
    hmax = int(hop.max()) if n > 1 else 0
    cap = _hop_guard(n)
    if hmax > cap:
        raise ValueError(
            f"hop depth {hmax} exceeds the rebalance guard {cap}")

    size = np.ones(n, dtype=np.int64)
    for v in reversed(order):
        if v != root:
            size[int(par[v])] += size[v]

    tin = np.zeros(n, dtype=np.int64)
    tout = np.zeros(n, dtype=np.int64)
    clock = 0
    stack = [(root, False)]
    while stack:
        v, done = stack.pop()
        if done:
            tout[v] = clock
            continue
        tin[v] = clock
        clock += 1
        stack.append((v, True))
        for c in reversed(kids[v]):
            stack.append((c, False))

    # U: lowest vertices that are still heavy
    inU = np.zeros(n, dtype=bool)
    for v in range(n):
        if size[v] > WORD and all(size[c] <= WORD for c in kids[v]):
            inU[v] = True
    top = inU.copy()
    for v in reversed(order):
        if top[v] and v != root:
            top[int(par[v])] = True

    # bottom forest: maximal subtrees avoiding the top tree
    fid = np.full(n, -1, dtype=np.int64)
    froot: List[int] = []
    ftrees: List[List[int]] = []
    for v in order:
        if top[v]:
            continue
        if v == root or top[int(par[v])]:
            fid[v] = len(froot)
            froot.append(v)
            ftrees.append([v])
        else:
            fid[v] = fid[int(par[v])]
            ftrees[int(fid[v])].append(v)

    fldepth: List[List[int]] = []
    flvert: List[List[int]] = []
    lidx = np.zeros(n, dtype=np.int64)
    for vs in ftrees:
        assert len(vs) <= WORD, "bottom tree outgrew the word size"
        vs.sort(key=lambda x: (int(depth[x]), x))
        for i, x in enumerate(vs):
            lidx[x] = i
        fldepth.append([int(depth[x]) for x in vs])
        flvert.append(list(vs))
    fword = [0] * n
    for v in order:
        if fid[v] < 0:
            continue
        bit = 1 << int(lidx[v])
        p = int(par[v])
        if v != root and fid[p] == fid[v]:
            fword[v] = fword[p] | bit
        else:
            fword[v] = bit

    # centroid paths; ranks come from full-tree sizes, so at most one
    # child can continue its parent's path
    path_of = np.full(n, -1, dtype=np.int64)
    path_verts: List[List[int]] = []
    for v in order:
        if not top[v]:
            continue
        p = int(par[v])
        if v != root and top[p] and int(size[p]).bit_length() == int(size[v]).bit_length():
            path_of[v] = path_of[p]
            path_verts[int(path_of[v])].append(v)
        else:
            path_of[v] = len(path_verts)
            path_verts.append([v])
    path_depths = [[int(depth[x]) for x in vs] for vs in path_verts]

    leafptr = np.full(n, -1, dtype=np.int64)
    for v in reversed(order):
        if not top[v]:
            continue
        if inU[v]:
            leafptr[v] = v
        else:
            for c in kids[v]:
                if top[c]:
                    leafptr[v] = leafptr[c]
                    break
    assert all(leafptr[v] >= 0 for v in range(n) if top[v]), \
        "top vertex without a heavy descendant"

    # per heavy vertex: the centroid paths its root path crosses
    head_depths: Dict[int, List[int]] = {}
    head_paths: Dict[int, List[int]] = {}
    for u in np.flatnonzero(inU):
        u = int(u)
        hd: List[int] = []
        hp: List[int] = []
        cur = u
        while cur >= 0:
            pi = int(path_of[cur])
            head = path_verts[pi][0]
            hd.append(int(depth[head]))
            hp.append(pi)
            cur = int(par[head]) if head != root else -1
        hd.reverse()
        hp.reverse()
        head_depths[u] = hd
        head_paths[u] = hp

    led = SpaceLedger()
    led.add("wla_parent", 64 * n)
    led.add("wla_depth", 64 * n)
    led.add("wla_euler", 128 * n)
    led.add("wla_bottom", 64 * n + sum(64 * (2 * len(vs) + 1) for vs in ftrees))
    led.add("wla_paths", sum(128 * len(vs) for vs in path_verts) + 64 * n)
    led.add("wla_heads", sum(128 * len(v) for v in head_depths.values()))
    constants = {
        "n": float(n),
        "hop_depth": float(hmax),
        "heavy": float(int(inU.sum())),
        "paths": float(len(path_verts)),
        "bottom_trees": float(len(ftrees)),
    }
    return WLAStructure(par, depth, root, tin, tout, fid, froot, fldepth,
                        flvert, fword, leafptr, path_verts, path_depths,
                        head_depths, head_paths, led, constants)


def wla_query(w: WLAStructure, v: int, d) -> int:
    """Deepest ancestor-or-self of ``v`` with weighted depth <= ``d``.

    ``d`` below zero returns the root; ``d`` >= depth(v) returns ``v``.
    """
    n = len(w.parent)
    v = int(v)
    if not (0 <= v < n):
        raise ValueError("vertex id out of range")
    d = int(math.floor(d))
    if d < 0:
        return w.root
    if d >= int(w.depth[v]):
        return v
    if w.fid[v] >= 0:
        t = int(w.fid[v])
        base = w.fldepth[t]
        if d >= base[0]:
            i = bisect_right(base, d) - 1
            mask = w.fword[v] & ((1 << (i + 1)) - 1)
            assert mask, "bottom tree lost its root bit"
            return w.flvert[t][mask.bit_length() - 1]
        v = int(w.parent[w.froot[t]])
        if d >= int(w.depth[v]):
            return v
    # v is now in the top tree and d < depth(v)
    u = int(w.leafptr[v])
    hd = w.head_depths[u]
    k = bisect_right(hd, d) - 1
    pi = w.head_paths[u][k]
    pd = w.path_depths[pi]
    j = bisect_right(pd, d) - 1
    y = w.path_verts[pi][j]
    if w.tin[y] <= w.tin[u] < w.tout[y]:
        return y
    # y left the root path; the answer is the vertex the next path hangs off
    nxt = w.path_verts[w.head_paths[u][k + 1]][0]
    return int(w.parent[nxt])
