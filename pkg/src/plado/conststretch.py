"""Constant-stretch distance oracle over a three-level piece hierarchy.

The graph is cut into nested divisions; every non-leaf piece carries a
2-approximate labeling of its children's boundary vertices, every
vertex knows its nearest piece boundary per level, and every leaf piece
stores all pairwise distances in a bit-packed table.  Queries combine
the three and never underestimate; the stretch stays below 8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

from .decomposition import recursive_decomposition
from .graph import INF, PlanarGraph, SpaceLedger, ceil_ratio, sssp
from .labeling import SeparatorLabeling, _HeavyWalker, build_labeling


# ---------------------------------------------------------------------------
# packed per-piece lookup tables
# ---------------------------------------------------------------------------


@dataclass
class CompactLookupTable:
    """All-pairs 2-approximations for one piece in 2-beta-bit fields.

    Each ordered pair (u, v) packs (edge label, multiplier) at offset
    2*beta*l(v) of u's word; label 0 is the dummy infinite edge.  The
    encoded value w(e_uv) * rho is within [d_P, 2 d_P].
    """

    verts: np.ndarray
    edge_ids: np.ndarray
    wp: np.ndarray
    beta: int
    words: List[int]
    mode: str = "native"
    vmap: Dict[int, int] = field(default_factory=dict)

    def bits(self) -> int:
        per_vertex = 2 * self.beta * len(self.verts)
        return (len(self.verts) * per_vertex
                + 64 * (len(self.wp) + len(self.verts) + len(self.edge_ids)))

    def _locate(self, u: int, v: int) -> Tuple[int, int]:
        lu = self.vmap.get(int(u))
        lv = self.vmap.get(int(v))
        if lu is None or lv is None:
            raise ValueError("vertex pair does not share this leaf piece")
        return lu, lv

    def pair_fields(self, u: int, v: int) -> Tuple[int, int]:
        """(edge label, rho) decoded by shift and mask."""
        lu, lv = self._locate(u, v)
        f = (self.words[lu] >> (2 * self.beta * lv)) & ((1 << (2 * self.beta)) - 1)
        return f >> self.beta, f & ((1 << self.beta) - 1)

    def query(self, u: int, v: int) -> float:
        lab, rho = self.pair_fields(u, v)
        if rho == 0:
            return 0.0
        if lab == 0:
            return INF
        return float(self.wp[lab]) * rho

    def pair_edge(self, u: int, v: int) -> int:
        """Graph edge id behind the pair's label, -1 for the dummy."""
        lab, _ = self.pair_fields(u, v)
        return -1 if lab == 0 else int(self.edge_ids[lab - 1])


def build_lookup_table(g: PlanarGraph, ceiling_mode: str = "native",
                       verts: Optional[np.ndarray] = None,
                       edge_ids: Optional[np.ndarray] = None) -> CompactLookupTable:
    """Brute-force table for one piece: exact Dijkstra per vertex, then
    the heaviest edge of each witness path and its rounded multiplier.

    ``verts`` / ``edge_ids`` translate local ids when g is a subgraph.
    """
    if ceiling_mode not in ("native", "iterative"):
        raise ValueError("ceiling mode must be native or iterative")
    n, m = g.n, g.m
    if verts is None:
        verts = np.arange(n, dtype=np.int64)
    if edge_ids is None:
        edge_ids = np.arange(m, dtype=np.int64)
    wp = np.empty(m + 1)
    wp[0] = INF
    for i, e in enumerate(g.edges):
        wp[i + 1] = e.w
    beta = max(1, m.bit_length())

    inc: List[List[Tuple[int, float, int]]] = [[] for _ in range(n)]
    for le, e in enumerate(g.edges):
        if e.pseudo:
            continue
        inc[e.u].append((e.v, e.w, le))
        inc[e.v].append((e.u, e.w, le))

    words: List[int] = []
    if n == 1:
        words.append(0)
    else:
        mat = g.csr()
        dmat, pmat = _csgraph_dijkstra(
            mat, directed=False, return_predecessors=True
        )
        for lu in range(n):
            walker = _HeavyWalker(dmat[lu], pmat[lu], inc)
            word = 0
            for lv in range(n):
                if lv == lu:
                    lab, rho = 0, 0
                elif not math.isfinite(dmat[lu][lv]):
                    lab, rho = 0, 1
                else:
                    d = float(dmat[lu][lv])
                    w_e, le = walker.get(lv)
                    lab = le + 1
                    if w_e == 0.0:
                        rho = 0  # all-zero path, the encoding stays exact
                    else:
                        rho = ceil_ratio(d, w_e, ceiling_mode)
                    if rho > max(1, m):
                        raise AssertionError("multiplier exceeded the edge count")
                word |= ((lab << beta) | rho) << (2 * beta * lv)
            words.append(word)

    vmap = {int(gv): i for i, gv in enumerate(verts)}
    return CompactLookupTable(
        np.asarray(verts, dtype=np.int64), np.asarray(edge_ids, dtype=np.int64),
        wp, beta, words, ceiling_mode, vmap,
    )


def lookup_query(t: CompactLookupTable, u: int, v: int) -> float:
    """Decoded pair value; in [d_P, 2 d_P], +inf when disconnected."""
    return t.query(u, v)


# ---------------------------------------------------------------------------
# the oracle
# ---------------------------------------------------------------------------


class ConstStretchOracle:
    """Never underestimates, stretch at most 8, near-linear space."""

    def __init__(self, g: PlanarGraph, ceiling_mode: str):
        self.g = g
        self.mode = ceiling_mode
        self.rd = None
        self.degenerate = False
        self.r1 = 0
        self.r2 = 0
        self.bvert: Dict[int, np.ndarray] = {}
        self.bdist: Dict[int, np.ndarray] = {}
        self.bhvy: Dict[int, np.ndarray] = {}
        self.labels: Dict[int, Tuple[SeparatorLabeling, Dict[int, int],
                                     np.ndarray, List[int]]] = {}
        self.tables: Dict[int, CompactLookupTable] = {}
        self.ledger = SpaceLedger()
        self.constants: Dict[str, float] = {"c_W": 8.0}

    # -- queries ------------------------------------------------------

    def _check(self, u: int) -> int:
        u = int(u)
        if not (0 <= u < self.g.n):
            raise ValueError("vertex id out of range")
        return u

    def _candidates(self, u: int, v: int):
        """(value, level tag, context) per applicable query rule."""
        out = []
        if self.degenerate:
            t = self.tables[0]
            out.append((t.query(u, v), "leaf", 0))
            return out
        k = self.rd.k
        pa = self.rd.piece_at
        if pa[k][u] == pa[k][v]:
            t = self.tables[int(pa[k][u])]
            out.append((t.query(u, v), "leaf", int(pa[k][u])))
        for i in range(k):
            if pa[i][u] != pa[i][v]:
                continue
            du = float(self.bdist[i + 1][u])
            dv = float(self.bdist[i + 1][v])
            ent = self.labels.get(int(pa[i][u]))
            if ent is None or not (math.isfinite(du) and math.isfinite(dv)):
                continue
            lab, vmap, _, _ = ent
            bu = vmap[int(self.bvert[i + 1][u])]
            bv = vmap[int(self.bvert[i + 1][v])]
            dt, win = lab.query_detail(bu, bv)
            if math.isfinite(dt):
                out.append((du + dt + dv, "level", (i, win, bu, bv)))
        return out

    def query(self, u: int, v: int) -> float:
        u, v = self._check(u), self._check(v)
        if u == v:
            return 0.0
        cands = self._candidates(u, v)
        return min((c[0] for c in cands), default=INF)

    def query_with_edge(self, u: int, v: int) -> Tuple[float, int]:
        """Distance plus a heaviest edge of the winning implicit path."""
        u, v = self._check(u), self._check(v)
        if u == v:
            return 0.0, -1
        best, idx = INF, -1
        cands = self._candidates(u, v)
        for j, (val, _, _) in enumerate(cands):
            if val < best:
                best, idx = val, j
        if idx < 0:
            return INF, -1
        val, kind, ctx = cands[idx]
        edges = self._candidate_edges(u, v, kind, ctx)
        if not edges:
            return val, -1
        w = self.g.edges
        e = max(edges, key=lambda x: (w[x].w, -x))
        return val, int(e)

    def _candidate_edges(self, u, v, kind, ctx) -> List[int]:
        if kind == "leaf":
            e = self.tables[ctx].pair_edge(u, v)
            return [e] if e >= 0 else []
        i, win, _, _ = ctx
        lab, _, srt, _ = self.labels[int(self.rd.piece_at[i][u])]
        edges = [int(srt[le]) for le in lab.heavy_edges(win)]
        for x in (u, v):
            he = int(self.bhvy[i + 1][x])
            if he >= 0:
                edges.append(he)
        return edges

    def route_edges(self, u: int, v: int) -> List[int]:
        """Debug reconstruction of the winning candidate's walk."""
        u, v = self._check(u), self._check(v)
        if u == v:
            return []
        best, choice = INF, None
        for val, kind, ctx in self._candidates(u, v):
            if val < best:
                best, choice = val, (kind, ctx)
        if choice is None:
            return []
        kind, ctx = choice
        if kind == "leaf":
            nd = 0 if self.degenerate else ctx
            return self._leaf_walk(nd, u, v)
        i, win, bu, bv = ctx
        nid = int(self.rd.piece_at[i][u])
        lab, _, srt, _ = self.labels[nid]
        mid = [int(srt[le]) for le in lab.route_edges(bu, bv)]
        return (self._boundary_walk(i + 1, u)
                + mid
                + self._boundary_walk(i + 1, v))

    def _leaf_walk(self, nid: int, u: int, v: int) -> List[int]:
        if self.degenerate:
            t = sssp(self.g, u)
            out, x = [], v
            while t.parent[x] >= 0 and x != u:
                out.append(int(t.parent_edge[x]))
                x = int(t.parent[x])
            return out
        nd = self.rd.nodes[nid]
        sub, verts, vmap = self.g.subgraph(nd.edges)
        srt = np.asarray(sorted(int(x) for x in nd.edges), dtype=np.int64)
        t = sssp(sub, vmap[u])
        out, x = [], vmap[v]
        while t.parent[x] >= 0:
            out.append(int(srt[t.parent_edge[x]]))
            x = int(t.parent[x])
        return out

    def _boundary_walk(self, lvl: int, u: int) -> List[int]:
        """The witness walk behind bdist[lvl][u], rebuilt verbatim."""
        nd = self.rd.nodes[int(self.rd.piece_at[lvl][u])]
        if len(nd.boundary) == 0:
            return []
        sub, verts, vmap = self.g.subgraph(nd.edges)
        srt = np.asarray(sorted(int(x) for x in nd.edges), dtype=np.int64)
        src = np.asarray([vmap[int(b)] for b in nd.boundary], dtype=np.int64)
        dist, pred, _ = _csgraph_dijkstra(
            sub.csr(), directed=False, indices=src,
            min_only=True, return_predecessors=True,
        )
        out, x = [], vmap[u]
        inc: Dict[Tuple[int, int], List[Tuple[float, int]]] = {}
        for le, e in enumerate(sub.edges):
            inc.setdefault((e.u, e.v), []).append((e.w, le))
            inc.setdefault((e.v, e.u), []).append((e.w, le))
        while pred[x] >= 0:
            pw = int(pred[x])
            step = min(
                le for (w_e, le) in inc[(x, pw)]
                if dist[pw] + w_e == dist[x]
            )
            out.append(int(srt[step]))
            x = pw
        return out


def build_const_stretch(g: PlanarGraph,
                        ceiling_mode: str = "native") -> ConstStretchOracle:
    """Assemble the oracle; g must be connected.

    r_1 = ceil(log2(n)^2) and r_2 = ceil(log2(r_1)^2), both floored at 4;
    r_2 is additionally capped at r_1 / 2 so the nested division keeps
    halving.  When r_1 >= n the hierarchy collapses to one lookup table.
    """
    t0 = sssp(g, 0)
    if not np.all(np.isfinite(t0.dist)):
        raise ValueError("graph must be connected")
    n = g.n
    o = ConstStretchOracle(g, ceiling_mode)
    r1 = max(4, math.ceil(math.log2(n) ** 2)) if n >= 2 else 4
    o.r1 = r1
    if r1 >= n:
        o.degenerate = True
        o.tables[0] = build_lookup_table(g, ceiling_mode)
        o.ledger.add("leaf_tables", o.tables[0].bits())
        o.constants.update(r1=float(r1), r2=float(r1),
                           c_words=o.ledger.total_words / max(1, n))
        return o
    r2 = min(max(4, math.ceil(math.log2(r1) ** 2)), r1 // 2)
    o.r2 = r2
    rd = recursive_decomposition(g, [r1, r2])
    o.rd = rd
    k = rd.k

    for lvl in range(1, k + 1):
        o.bvert[lvl] = np.full(n, -1, dtype=np.int64)
        o.bdist[lvl] = np.full(n, INF)
        o.bhvy[lvl] = np.full(n, -1, dtype=np.int64)
    for nd in rd.nodes:
        if nd.level == 0 or len(nd.boundary) == 0:
            continue
        sub, verts, vmap = g.subgraph(nd.edges)
        srt = np.asarray(sorted(int(x) for x in nd.edges), dtype=np.int64)
        src = np.asarray([vmap[int(b)] for b in nd.boundary], dtype=np.int64)
        dist, pred, srcv = _csgraph_dijkstra(
            sub.csr(), directed=False, indices=src,
            min_only=True, return_predecessors=True,
        )
        inc: List[List[Tuple[int, float, int]]] = [[] for _ in range(sub.n)]
        for le, e in enumerate(sub.edges):
            ge = int(srt[le])
            inc[e.u].append((e.v, e.w, ge))
            inc[e.v].append((e.u, e.w, ge))
        walker = _HeavyWalker(dist, pred, inc)
        row = rd.piece_at[nd.level]
        for lv, gv in enumerate(verts):
            if row[gv] != nd.id or not math.isfinite(dist[lv]):
                continue
            o.bvert[nd.level][gv] = verts[int(srcv[lv])]
            o.bdist[nd.level][gv] = dist[lv]
            o.bhvy[nd.level][gv] = walker.get(lv)[1]

    label_bits = 0
    for nd in rd.nodes:
        if nd.level >= k or not nd.children:
            continue
        bset = sorted({int(b) for cid in nd.children
                       for b in rd.nodes[cid].boundary})
        if not bset:
            continue
        sub, verts, vmap = g.subgraph(nd.edges)
        srt = np.asarray(sorted(int(x) for x in nd.edges), dtype=np.int64)
        lab = build_labeling(sub, [vmap[b] for b in bset], 1.0)
        o.labels[nd.id] = (lab, vmap, srt, verts)
        label_bits += lab.ledger.total_bits

    table_bits = 0
    for nd in rd.nodes:
        if nd.level != k:
            continue
        sub, verts, vmap = g.subgraph(nd.edges)
        srt = np.asarray(sorted(int(x) for x in nd.edges), dtype=np.int64)
        t = build_lookup_table(
            sub, ceiling_mode,
            verts=np.asarray(verts, dtype=np.int64), edge_ids=srt,
        )
        o.tables[nd.id] = t
        table_bits += t.bits()

    o.ledger.add("boundary_labelings", label_bits)
    o.ledger.add("leaf_tables", table_bits)
    o.ledger.add("boundary_pointers", k * 3 * 64 * n)
    o.ledger.add("piece_index", (k + 1) * 64 * n)
    o.constants.update(r1=float(r1), r2=float(r2),
                       c_words=o.ledger.total_words / n)
    return o


def const_query(o: ConstStretchOracle, u: int, v: int) -> float:
    """min over the level rules; in [d_G, 8 d_G]."""
    return o.query(u, v)


def const_query_with_edge(o: ConstStretchOracle, u: int,
                          v: int) -> Tuple[float, int]:
    """As const_query, plus a heaviest edge of the implicit path."""
    return o.query_with_edge(u, v)
