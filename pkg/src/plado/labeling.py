"""Separator-portal distance labels for a terminal set.

Each terminal stores, for every node on its root path in a recursive
terminal decomposition, a few portals on the node's two separator paths
together with in-region distances.  Two labels alone reconstruct an
approximate distance: a shortest path between two terminals must cross
a separator path of their deepest shared node while still inside that
node's region, and the crossing point is portal-covered on both sides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

from .decomposition import STauDecomposition, s_tau_decompose
from .graph import INF, PlanarGraph, SpaceLedger, path_max_edge, sssp


@dataclass
class PortalSet:
    """Portals of one labeled vertex on one separator path.

    ``key`` is (decomposition node id, path side); two labels sharing a
    key compare portals through ``pos``, the offset of each portal along
    the path, without touching the graph.  ``hvy`` is the heaviest edge
    on a witness path from the labeled vertex to each portal (-1 when
    the portal is the vertex itself or unreachable).
    """

    key: Tuple[int, int]
    level: int
    portals: np.ndarray
    pidx: np.ndarray   # index of each portal within the separator path
    dist: np.ndarray
    pos: np.ndarray
    hvy: np.ndarray


def _cover_indices(pos: np.ndarray, du: np.ndarray, eps: float) -> np.ndarray:
    """Portal positions covering every on-path target within (1+eps).

    Two greedy sweeps guarantee that for any target t on the path some
    chosen c satisfies du[c] + |pos[c]-pos[t]| <= (1+eps)*du[t]; a
    uniform grid keeps consecutive portals at most eps * (path length)
    apart unless two path vertices are themselves further apart.
    """
    n = len(pos)
    fin = np.isfinite(du)
    keep = set()
    best = INF
    for i in range(n):
        if fin[i] and best + pos[i] > (1.0 + eps) * du[i]:
            keep.add(i)
            best = min(best, du[i] - pos[i])
    best = INF
    for i in range(n - 1, -1, -1):
        if fin[i] and best - pos[i] > (1.0 + eps) * du[i]:
            keep.add(i)
            best = min(best, du[i] + pos[i])
    step = eps * (pos[-1] - pos[0])
    cur = 0
    keep.add(0)
    for i in range(1, n):
        if pos[i] - pos[cur] > step:
            cur = i - 1 if i - 1 > cur else i
            keep.add(cur)
    keep.add(n - 1)
    return np.asarray(sorted(keep), dtype=np.int64)


class _HeavyWalker:
    """Heaviest edge from one source to every vertex of a region tree.

    Works off a scipy predecessor row; each parent step is resolved to
    the smallest edge id whose weight matches the distance difference
    exactly.  Results are memoized along root paths.
    """

    def __init__(self, drow, prow, inc):
        self.d = drow
        self.p = prow
        self.inc = inc
        self.memo: Dict[int, Tuple[float, int]] = {}

    def step_edge(self, w: int) -> Tuple[float, int]:
        pw = int(self.p[w])
        cands = [
            (wt, ge)
            for (o, wt, ge) in self.inc[w]
            if o == pw and self.d[pw] + wt == self.d[w]
        ]
        if not cands:  # float dust; fall back to the nearest weight
            _, wt, ge = min(
                (abs(self.d[pw] + wt - self.d[w]), wt, ge)
                for (o, wt, ge) in self.inc[w]
                if o == pw
            )
            cands = [(wt, ge)]
        return min(cands, key=lambda t: t[1])

    def get(self, w: int) -> Tuple[float, int]:
        """(weight, edge id) of the heaviest edge on the witness path."""
        chain = []
        x = int(w)
        while x not in self.memo:
            if self.p[x] < 0:
                self.memo[x] = (-1.0, -1)  # the source itself
                break
            chain.append(x)
            x = int(self.p[x])
        for y in reversed(chain):
            sw, se = self.step_edge(y)
            hw, he = self.memo[int(self.p[y])]
            if sw > hw or (sw == hw and (he < 0 or se < he)):
                self.memo[y] = (sw, se)
            else:
                self.memo[y] = (hw, he)
        return self.memo[int(w)]


class SeparatorLabeling:
    """Distance labels over one connected graph, restricted to S.

    query(u, v) never underestimates the true distance in the labeled
    graph and overshoots by at most a (1+eps) factor.
    """

    def __init__(self, g: PlanarGraph, stau: Optional[STauDecomposition],
                 eps: float, labels: Dict[int, List[PortalSet]],
                 direct: Dict[int, Dict[int, Tuple[float, int]]]):
        self.g = g
        self.stau = stau
        self.eps = eps
        self.labels = labels
        self.direct = direct
        self.depth = stau.depth() if stau is not None else 0
        self.ledger = SpaceLedger()
        bits = 0
        for sets in labels.values():
            bits += sum(2 * 64 + 4 * 64 * len(ps.portals) for ps in sets)
        self.ledger.add("labels", bits)
        self.ledger.add("direct", 128 * sum(len(d) for d in direct.values()))

    @property
    def terminals(self) -> List[int]:
        return sorted(self.labels)

    def entry_count(self, u: int) -> int:
        return sum(len(ps.portals) for ps in self.labels[int(u)])

    def entries(self, u: int) -> List[Tuple[int, int, float]]:
        """Flat (separator level, portal vertex, distance) view of a label."""
        out = []
        for ps in self.labels[int(u)]:
            for p, d in zip(ps.portals, ps.dist):
                out.append((ps.level, int(p), float(d)))
        return out

    def _check(self, u: int) -> int:
        u = int(u)
        if u not in self.labels:
            raise ValueError(f"vertex {u} carries no label")
        return u

    def query(self, u: int, v: int) -> float:
        u, v = self._check(u), self._check(v)
        if u == v:
            return 0.0
        return self._best(u, v)[0]

    def query_detail(self, u: int, v: int):
        """(value, winning candidate) with enough context to rebuild it."""
        u, v = self._check(u), self._check(v)
        if u == v:
            return 0.0, None
        return self._best(u, v)

    def _best(self, u: int, v: int):
        best = INF
        win = None
        hit = self.direct.get(u, {}).get(v)
        if hit is not None:
            best = hit[0]
            win = ("direct", u, v, hit[1])
        bykey = {ps.key: ps for ps in self.labels[v]}
        for su in self.labels[u]:
            sv = bykey.get(su.key)
            if sv is None:
                continue
            cand = (su.dist[:, None]
                    + np.abs(su.pos[:, None] - sv.pos[None, :])
                    + sv.dist[None, :])
            k = int(np.argmin(cand))
            val = float(cand.flat[k])
            if val < best:
                best = val
                pi, qi = divmod(k, cand.shape[1])
                win = ("portal", su, int(pi), sv, int(qi))
        return best, win

    def route_edges(self, u: int, v: int) -> List[int]:
        """Edge ids of the winning candidate's three witness segments."""
        val, win = self.query_detail(u, v)
        if win is None or not math.isfinite(val):
            return []
        if win[0] == "direct":
            return self._walk(self.g, u, v)
        _, su, pi, sv, qi = win
        p, q = int(su.portals[pi]), int(sv.portals[qi])
        out = self._region_walk(su.key[0], u, p)
        out += self._tree_walk(p, q)
        out += self._region_walk(sv.key[0], v, q)
        return out

    def heavy_edges(self, win) -> List[int]:
        """Heaviest-edge ids of each segment of a winning candidate."""
        if win is None:
            return []
        if win[0] == "direct":
            return [win[3]] if win[3] >= 0 else []
        _, su, pi, sv, qi = win
        out = [int(su.hvy[pi]), int(sv.hvy[qi])]
        p, q = int(su.portals[pi]), int(sv.portals[qi])
        if p != q:
            e = path_max_edge(self.stau.t, p, q, g=self.stau.gd)
            if e >= self.g.m:
                raise AssertionError("tree path ran through a pseudo edge")
            out.append(int(e))
        return [e for e in out if e >= 0]

    def _tree_walk(self, p: int, q: int) -> List[int]:
        t = self.stau.t
        lo, hi = (p, q) if t.dist[p] <= t.dist[q] else (q, p)
        out = []
        x = hi
        while x != lo:
            e = int(t.parent_edge[x])
            if e < 0:
                raise AssertionError("portals not on one monotone path")
            out.append(e)
            x = int(t.parent[x])
        return out

    def _region_walk(self, nid: int, u: int, p: int) -> List[int]:
        if u == p:
            return []
        X = self.stau.nodes[nid]
        sub, verts, vmap = self.stau.gd.subgraph(X.edges)
        srt = np.asarray(sorted(int(x) for x in X.edges), dtype=np.int64)
        t = sssp(sub, vmap[u])
        out = []
        x = vmap[p]
        while t.parent[x] >= 0:
            out.append(int(srt[t.parent_edge[x]]))
            x = int(t.parent[x])
        if verts[x] != u:
            raise AssertionError("portal unreachable inside its region")
        return out

    def _walk(self, g: PlanarGraph, u: int, v: int) -> List[int]:
        t = sssp(g, u)
        out = []
        x = v
        while t.parent[x] >= 0:
            out.append(int(t.parent_edge[x]))
            x = int(t.parent[x])
        return out


def build_labeling(g: PlanarGraph, S, eps: float) -> SeparatorLabeling:
    """Distance labels for S such that label pairs answer within (1+eps).

    Entry counts per label stay proportional to the decomposition depth
    times ceil(1/eps).  Leaves of the decomposition that still hold two
    or more terminals (possible only on degenerate two-vertex regions)
    fall back to exact pairwise entries.
    """
    if not (eps > 0):
        raise ValueError("eps must be positive")
    S = sorted({int(v) for v in S})
    if S and (S[0] < 0 or S[-1] >= g.n):
        raise ValueError("terminal outside the vertex range")
    labels: Dict[int, List[PortalSet]] = {u: [] for u in S}
    direct: Dict[int, Dict[int, Tuple[float, int]]] = {}
    if not S:
        return SeparatorLabeling(g, None, eps, labels, direct)

    stau = s_tau_decompose(g, S, 1)
    gd, t = stau.gd, stau.t

    for X in stau.nodes:
        if X.is_leaf() or not X.chi:
            continue
        srt = np.asarray(sorted(int(x) for x in X.edges), dtype=np.int64)
        sub, verts, vmap = gd.subgraph(X.edges)
        mat = sub.csr()
        src = np.asarray([vmap[c] for c in X.chi], dtype=np.int64)
        dmat, pmat = _csgraph_dijkstra(
            mat, directed=False, indices=src, return_predecessors=True
        )
        if dmat.ndim == 1:
            dmat, pmat = dmat[None, :], pmat[None, :]
        inc: List[List[Tuple[int, float, int]]] = [[] for _ in range(sub.n)]
        for le, e in enumerate(sub.edges):
            if e.pseudo:
                continue
            ge = int(srt[le])
            inc[e.u].append((e.v, e.w, ge))
            inc[e.v].append((e.u, e.w, ge))

        for side, path in ((0, X.paths[-2]), (1, X.paths[-1])):
            parr = np.asarray(path, dtype=np.int64)
            ploc = np.asarray([vmap[p] for p in path], dtype=np.int64)
            pos = t.dist[parr]
            if np.any(np.diff(pos) < 0):
                raise AssertionError("separator path is not monotone")
            for si, u in enumerate(X.chi):
                du = dmat[si][ploc]
                if not np.any(np.isfinite(du)):
                    continue
                idx = _cover_indices(pos, du, eps)
                walker = _HeavyWalker(dmat[si], pmat[si], inc)
                hvy = np.empty(len(idx), dtype=np.int64)
                for j, ii in enumerate(idx):
                    lw = int(ploc[ii])
                    if not math.isfinite(du[ii]) or lw == vmap[u]:
                        hvy[j] = -1
                    else:
                        hvy[j] = walker.get(lw)[1]
                labels[u].append(PortalSet(
                    (X.id, side), X.depth, parr[idx], idx,
                    du[idx], pos[idx], hvy,
                ))

    # degenerate leaves keeping several terminals: exact pairwise patch
    for X in stau.nodes:
        if not X.is_leaf() or len(X.chi) < 2:
            continue
        for u in X.chi:
            tu = sssp(g, u)
            for v in X.chi:
                if v == u or not math.isfinite(tu.dist[v]):
                    continue
                e = -1
                if tu.dist[v] >= 0 and v != u:
                    e = path_max_edge(tu, u, v, g=g)
                direct.setdefault(u, {})[v] = (float(tu.dist[v]), int(e))

    return SeparatorLabeling(g, stau, eps, labels, direct)
