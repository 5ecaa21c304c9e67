"""Weak nets, well separate decompositions, and sparse covers.

The decomposition slices a graph into width-r annuli by shortest-path
distance from a root, grows balls of radius (i+1)r around the core
vertices of each slice, and recurses on the connected components of
those balls.  Three levels of this yield triples (H_i, K_i, A_i) whose
terminal sets are pairwise r-separated while the assignment sets A_i
cover every terminal within O(r).  Weak nets pick one terminal per
triple; sparse covers keep the cluster family itself.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

from .graph import PlanarGraph

__all__ = [
    "ComponentSplitError",
    "WSDTriple",
    "WellSeparateDecomposition",
    "WeakNet",
    "SparseCover",
    "decompose",
    "weak_net",
    "sparse_cover",
]

Assignment = Dict[int, np.ndarray]


class ComponentSplitError(ValueError):
    """The subgraph is disconnected; split it into components first."""


@dataclass
class WSDTriple:
    """One leaf (H_i, K_i, A_i) of the decomposition, plus its core."""

    verts: np.ndarray       # sorted vertex ids of H_i
    edges: np.ndarray       # edge ids of H_i (vertex-induced)
    terminals: np.ndarray   # K_i, sorted
    assign: Assignment      # terminal -> sorted covered-terminal array
    core: np.ndarray        # C_i, sorted
    level: int

    def dump_line(self) -> str:
        covered = sum(len(a) for a in self.assign.values())
        return f"{len(self.verts)} {len(self.terminals)} {covered}"


@dataclass
class WellSeparateDecomposition:
    triples: List[WSDTriple]
    r: float

    def dump(self) -> str:
        return "\n".join(t.dump_line() for t in self.triples)


@dataclass
class WeakNet:
    """Net points pairwise >= r apart; assign covers all terminals.

    gamma is the asserted covering factor: every y in assign[x] is
    within gamma*r of x.  Measured radii are checked in verification,
    not trusted from the construction.
    """

    points: np.ndarray
    assign: Assignment
    r: float
    gamma: float = 8.0


@dataclass
class SparseCover:
    """Cluster family: diameters <= delta, every ball of radius
    delta/beta contained in its home cluster, overlap at most s."""

    clusters: List[np.ndarray]
    cluster_edges: List[np.ndarray]
    home: np.ndarray        # vertex -> cluster whose core holds it
    beta: float
    s: int
    delta: float
    r: float

    def stats_line(self) -> str:
        return f"beta={self.beta:g} s={self.s} delta={self.delta:g}"


# ---------------------------------------------------------------------------
# low-level helpers
# ---------------------------------------------------------------------------


class _DSU:
    def __init__(self, n: int):
        self.p = list(range(n))

    def find(self, x: int) -> int:
        p = self.p
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.p[rb] = ra


def _edge_arrays(g: PlanarGraph) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    gu = np.fromiter((e.u for e in g.edges), dtype=np.int64, count=g.m)
    gv = np.fromiter((e.v for e in g.edges), dtype=np.int64, count=g.m)
    gw = np.fromiter((e.w for e in g.edges), dtype=np.float64, count=g.m)
    return gu, gv, gw


def _adjacency(nloc: int, lu: np.ndarray, lv: np.ndarray, w: np.ndarray):
    tails = np.concatenate([lu, lv])
    heads = np.concatenate([lv, lu])
    wts = np.concatenate([w, w])
    order = np.argsort(tails, kind="stable")
    indptr = np.searchsorted(tails[order], np.arange(nloc + 1))
    return indptr, heads[order], wts[order]


def _lex_dijkstra(indptr, nbr, wt, sources: Sequence[int], limit: float):
    """Multi-source Dijkstra truncated at limit.

    Equivalent to a virtual source joined to every seed by a weight-0
    edge.  Ties in distance are broken toward the smaller source id, so
    "closest, ties by vertex id" assignments come out deterministic.
    """
    n = len(indptr) - 1
    dist = np.full(n, np.inf)
    src = np.full(n, -1, dtype=np.int64)
    heap = []
    for s in sources:
        dist[s] = 0.0
        src[s] = s
        heap.append((0.0, s, s))
    heapq.heapify(heap)
    while heap:
        d, sx, v = heapq.heappop(heap)
        if d > dist[v] or (d == dist[v] and sx > src[v]):
            continue
        for k in range(indptr[v], indptr[v + 1]):
            u = nbr[k]
            nd = d + wt[k]
            if nd > limit:
                continue
            if nd < dist[u] or (nd == dist[u] and sx < src[u]):
                dist[u] = nd
                src[u] = sx
                heapq.heappush(heap, (nd, sx, int(u)))
    return dist, src


def _components(n: int, gu, gv, keep: np.ndarray):
    """Connected components over all n vertices and the kept edges.

    Returns (verts, edges) pairs sorted by smallest member vertex;
    isolated vertices form singleton components.
    """
    dsu = _DSU(n)
    for a, b in zip(gu[keep].tolist(), gv[keep].tolist()):
        dsu.union(a, b)
    groups: Dict[int, List[int]] = {}
    for v in range(n):
        groups.setdefault(dsu.find(v), []).append(v)
    by_edge: Dict[int, List[int]] = {}
    for e in keep.tolist():
        by_edge.setdefault(dsu.find(int(gu[e])), []).append(e)
    out = []
    for k in sorted(groups, key=lambda k: groups[k][0]):
        verts = np.array(groups[k], dtype=np.int64)
        edges = np.array(sorted(by_edge.get(k, [])), dtype=np.int64)
        out.append((verts, edges))
    return out


# ---------------------------------------------------------------------------
# the three-level decomposition
# ---------------------------------------------------------------------------


def _decompose(gu, gv, gw, verts, edges, terminals, assign, core,
               level, r, out, trace=None):
    if level == 3:
        out.append(WSDTriple(verts, edges, terminals, assign, core, level))
        return

    nloc = len(verts)
    lu = np.searchsorted(verts, gu[edges])
    lv = np.searchsorted(verts, gv[edges])
    indptr, nbr, wt = _adjacency(nloc, lu, lv, gw[edges])

    # root = smallest vertex id; slice index = floor(dist / r)
    dist, _ = _lex_dijkstra(indptr, nbr, wt, [0], np.inf)
    if not np.all(np.isfinite(dist)):
        raise ComponentSplitError(
            "subgraph is disconnected; split into components first")
    sidx = np.floor_divide(dist, r).astype(np.int64)

    core_mask = np.isin(verts, core, assume_unique=True)
    term_mask = np.isin(verts, terminals, assume_unique=True)
    if trace is not None:
        trace["root"] = int(verts[0])
        trace["verts"] = verts.copy()
        trace["slice_of"] = sidx.copy()
        trace["subcores"] = {}

    vorder = np.argsort(sidx, kind="stable")   # within a slice: ascending ids
    vkeys = sidx[vorder]
    emin = np.minimum(sidx[lu], sidx[lv])
    emax = np.maximum(sidx[lu], sidx[lv])
    eorder = np.argsort(emin, kind="stable")
    ekeys = emin[eorder]

    width = level + 1
    radius = width * r
    captured = np.zeros(nloc, dtype=bool)      # terminals already in some X_t
    kept = np.zeros(nloc, dtype=bool)

    for j in np.unique(vkeys).tolist():
        a, b = np.searchsorted(vkeys, [j, j + 1])
        smem = vorder[a:b]
        sub = smem[core_mask[smem]]            # subcore = slice ∩ core
        if trace is not None and len(sub):
            trace["subcores"][int(j)] = verts[np.sort(sub)]
        if len(sub) == 0:
            continue

        # materialize the j±width slice window; balls of radius (i+1)r
        # seeded inside slice j cannot leave it
        wa, wb = np.searchsorted(vkeys, [j - width, j + width + 1])
        wverts = np.sort(vorder[wa:wb])
        nw = len(wverts)
        ea, eb = np.searchsorted(ekeys, [j - width, j + width + 1])
        cand = eorder[ea:eb]
        cand = cand[emax[cand] <= j + width]
        wu = np.searchsorted(wverts, lu[cand])
        wv = np.searchsorted(wverts, lv[cand])
        wip, wnbr, wwt = _adjacency(nw, wu, wv, gw[edges[cand]])

        subw = np.searchsorted(wverts, np.sort(sub))
        distc, _ = _lex_dijkstra(wip, wnbr, wwt, subw.tolist(), radius)
        ball = np.isfinite(distc)

        kbar = sub[term_mask[sub] & ~captured[sub]]
        anext = assign
        kept[:] = False
        if len(kbar):
            kept[kbar] = True
            captured[kbar] = True
            anext = dict(assign)
            kbarw = np.searchsorted(wverts, kbar)
            distk, srck = _lex_dijkstra(wip, wnbr, wwt, kbarw.tolist(), radius)
            absorbed: Dict[int, List[int]] = {}
            for t in np.flatnonzero(np.isfinite(distk)).tolist():
                zl = int(wverts[t])
                if not term_mask[zl] or kept[zl] or captured[zl]:
                    continue
                captured[zl] = True
                xl = int(wverts[int(srck[t])])
                absorbed.setdefault(xl, []).append(zl)
            for xl, zs in absorbed.items():
                xg = int(verts[xl])
                parts = [assign[xg]] + [assign[int(verts[z])] for z in zs]
                anext[xg] = np.unique(np.concatenate(parts))

        # connected components of the induced ball subgraph
        bemask = ball[wu] & ball[wv]
        dsu = _DSU(nw)
        for x, y in zip(wu[bemask].tolist(), wv[bemask].tolist()):
            dsu.union(x, y)
        groups: Dict[int, List[int]] = {}
        for t in np.flatnonzero(ball).tolist():
            groups.setdefault(dsu.find(t), []).append(t)
        in_comp = np.zeros(nw, dtype=bool)
        for key in sorted(groups, key=lambda k: groups[k][0]):
            cw = np.array(groups[key], dtype=np.int64)
            cloc = wverts[cw]
            cg = verts[cloc]
            in_comp[:] = False
            in_comp[cw] = True
            ce = edges[cand[bemask & in_comp[wu]]]
            ck = cg[kept[cloc]]
            cc = cg[core_mask[cloc] & (sidx[cloc] == j)]
            ca = {int(x): anext[int(x)] for x in ck.tolist()}
            _decompose(gu, gv, gw, cg, np.sort(ce), ck, ca, cc,
                       level + 1, r, out)

    assert bool(np.all(captured[term_mask])), \
        "a terminal escaped the slice partition"


def decompose(g: PlanarGraph, terminals, r: float, core=None, assign=None,
              level: int = 0, edges=None, verts=None,
              trace: Optional[dict] = None) -> WellSeparateDecomposition:
    """Well separate decomposition of a (sub)graph of g.

    The subgraph defaults to all of g; every edge must weigh at most r
    (delete heavier edges before calling) and the subgraph must be
    connected.  terminals ⊆ core ⊆ verts.  trace, if given, captures
    the entry call's root, slice indices, and subcores for inspection.
    """
    if r <= 0:
        raise ValueError("slice width r must be positive")
    if not 0 <= level <= 3:
        raise ValueError("recursion level must lie in [0, 3]")
    gu, gv, gw = _edge_arrays(g)
    if edges is None:
        edges = np.array(g.real_edges(), dtype=np.int64)
        if verts is None:
            verts = np.arange(g.n, dtype=np.int64)
    else:
        edges = np.unique(np.asarray(edges, dtype=np.int64))
    if len(edges) and float(gw[edges].max()) > r:
        raise ValueError("an edge of the subgraph weighs more than r; "
                         "delete heavier edges before decomposing")
    if verts is None:
        if len(edges) == 0:
            raise ValueError("edgeless subgraph needs an explicit vertex set")
        verts = np.unique(np.concatenate([gu[edges], gv[edges]]))
    else:
        verts = np.unique(np.asarray(verts, dtype=np.int64))
        ends = np.unique(np.concatenate([gu[edges], gv[edges]])) \
            if len(edges) else np.empty(0, dtype=np.int64)
        if len(ends) and not np.all(np.isin(ends, verts, assume_unique=True)):
            raise ValueError("vertex set must contain every edge endpoint")
    terminals = np.unique(np.asarray(terminals, dtype=np.int64)).astype(np.int64)
    core = verts if core is None else np.unique(np.asarray(core, dtype=np.int64))
    for name, arr, universe in (("core", core, verts),
                                ("terminals", terminals, core)):
        if len(arr) and not np.all(np.isin(arr, universe, assume_unique=True)):
            raise ValueError(f"{name} must lie inside the subgraph's "
                             f"{'core' if name == 'terminals' else 'vertices'}")
    if assign is None:
        assign = {int(z): np.array([z], dtype=np.int64) for z in terminals}
    else:
        assign = {int(x): np.unique(np.asarray(a, dtype=np.int64))
                  for x, a in assign.items()}
    out: List[WSDTriple] = []
    _decompose(gu, gv, gw, verts, edges, terminals, assign, core,
               level, float(r), out, trace)
    return WellSeparateDecomposition(out, float(r))


# ---------------------------------------------------------------------------
# weak nets and sparse covers
# ---------------------------------------------------------------------------


def weak_net(g: PlanarGraph, K, r: float) -> WeakNet:
    """Weak (r, O(1))-net of the terminal set K with covering assignment.

    Edges heavier than r are deleted first; each surviving component is
    decomposed separately.  One net point per leaf triple with
    terminals: its smallest terminal.
    """
    if r <= 0:
        raise ValueError("net radius must be positive")
    K = np.unique(np.asarray(K, dtype=np.int64))
    if len(K) and (K[0] < 0 or K[-1] >= g.n):
        raise ValueError("terminal out of range")
    if len(K) == 0:
        return WeakNet(np.empty(0, dtype=np.int64), {}, float(r))
    gu, gv, gw = _edge_arrays(g)
    keep = np.array([i for i, e in enumerate(g.edges)
                     if not e.pseudo and e.w <= r], dtype=np.int64)
    points: List[int] = []
    assign: Assignment = {}
    for verts, edges in _components(g.n, gu, gv, keep):
        kc = K[np.isin(K, verts, assume_unique=True)]
        if len(kc) == 0:
            continue
        a0 = {int(z): np.array([z], dtype=np.int64) for z in kc}
        out: List[WSDTriple] = []
        _decompose(gu, gv, gw, verts, edges, kc, a0, verts, 0, float(r), out)
        for t in out:
            if len(t.terminals) == 0:
                continue
            x = int(t.terminals[0])
            cov = np.unique(np.concatenate(
                [t.assign[int(y)] for y in t.terminals.tolist()]))
            points.append(x)
            assign[x] = cov
    allcov = (np.sort(np.concatenate(list(assign.values())))
              if assign else np.empty(0, dtype=np.int64))
    assert len(allcov) == len(K) and bool(np.all(allcov == K)), \
        "net assignment must partition the terminals"
    return WeakNet(np.array(sorted(points), dtype=np.int64), assign, float(r))


def _cover_once(g, gu, gv, gw, r):
    keep = np.array([i for i, e in enumerate(g.edges)
                     if not e.pseudo and e.w <= r], dtype=np.int64)
    raw = []
    empty = np.empty(0, dtype=np.int64)
    for verts, edges in _components(g.n, gu, gv, keep):
        out: List[WSDTriple] = []
        _decompose(gu, gv, gw, verts, edges, empty, {}, verts, 0, r, out)
        raw.extend((t.verts, t.edges, t.core) for t in out)
    home = np.full(g.n, -1, dtype=np.int64)
    clusters: List[np.ndarray] = []
    cluster_edges: List[np.ndarray] = []
    index: Dict[bytes, int] = {}
    total_core = 0
    for cverts, cedges, ccore in raw:
        key = cverts.tobytes()
        cid = index.get(key)
        if cid is None:
            cid = len(clusters)
            index[key] = cid
            clusters.append(cverts)
            cluster_edges.append(cedges)
        home[ccore] = cid
        total_core += len(ccore)
    assert total_core == g.n and int(home.min()) >= 0, \
        "leaf cores must partition the vertices"
    return clusters, cluster_edges, home


def _cluster_diameter(verts, edges, gu, gv, gw) -> float:
    nv = len(verts)
    if nv <= 1 or len(edges) == 0:
        return 0.0
    lu = np.searchsorted(verts, gu[edges])
    lv = np.searchsorted(verts, gv[edges])
    w = gw[edges]
    # collapse parallel edges to their lightest copy
    order = np.lexsort((lv, lu))
    ku, kv, kw = lu[order], lv[order], w[order]
    first = np.ones(len(ku), dtype=bool)
    first[1:] = (ku[1:] != ku[:-1]) | (kv[1:] != kv[:-1])
    grp = np.cumsum(first) - 1
    mw = np.full(int(grp[-1]) + 1, np.inf)
    np.minimum.at(mw, grp, kw)
    mat = csr_matrix((mw, (ku[first], kv[first])), shape=(nv, nv))
    if nv <= 600:
        d = _csgraph_dijkstra(mat, directed=False)
        return float(d.max())
    ecc = _csgraph_dijkstra(mat, directed=False, indices=0)
    return 2.0 * float(ecc.max())   # conservative bound for huge clusters


def sparse_cover(g: PlanarGraph, delta: float) -> SparseCover:
    """(beta, s, delta)-sparse cover with measured beta and s.

    Runs the decomposition at slice width r = delta/beta, halving r
    until every cluster's measured diameter fits in delta.  Every
    vertex's ball of radius delta/beta stays inside its home cluster.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    gu, gv, gw = _edge_arrays(g)
    beta = 1.0
    for _ in range(64):
        r = delta / beta
        clusters, cluster_edges, home = _cover_once(g, gu, gv, gw, r)
        dmax = max(_cluster_diameter(cl, ed, gu, gv, gw)
                   for cl, ed in zip(clusters, cluster_edges))
        if dmax <= delta:
            counts = np.zeros(g.n, dtype=np.int64)
            for cl in clusters:
                counts[cl] += 1
            return SparseCover(clusters, cluster_edges, home, beta,
                               int(counts.max()), float(delta), r)
        beta *= 2.0
    raise RuntimeError("cover construction did not converge while halving r")
