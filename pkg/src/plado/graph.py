"""Embedded planar graphs and the primitives everything else builds on.

The graph representation is a rotation system: every edge (u, v) owns two
darts 2*eid (tail u) and 2*eid + 1 (tail v), and rotation[v] lists the darts
with tail v in cyclic order.  Faces are traced with next(d) = rotation
successor of the reverse dart at head(d); for a genus-0 embedding of a
connected graph the trace satisfies V - E + F = 2.

Pseudo edges (weight +inf) are used by the triangulation and are ignored by
all shortest-path computations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

INF = math.inf

__all__ = [
    "PlanarGraph",
    "ShortestPathTree",
    "SpaceLedger",
    "EmbeddingError",
    "triangulate",
    "sssp",
    "exact_distance",
    "distance_matrix",
    "multi_source_distances",
    "lca",
    "path_max_edge",
    "ceil_ratio",
    "generate_planar",
    "save_graph",
    "load_graph",
]


class EmbeddingError(ValueError):
    """Raised when a rotation system is inconsistent or not genus 0."""


# ---------------------------------------------------------------------------
# graph representation
# ---------------------------------------------------------------------------


@dataclass
class Edge:
    u: int
    v: int
    w: float
    pseudo: bool = False

    def other(self, x: int) -> int:
        return self.v if x == self.u else self.u


class PlanarGraph:
    """A connected embedded (multi)graph with non-negative edge weights.

    ``rotation[v]`` is the cyclic order of darts with tail v.  Dart 2*e is
    directed edges[e].u -> edges[e].v, dart 2*e+1 the reverse.  For directed
    graphs the edge is oriented u -> v for distance purposes while the
    embedding always refers to the underlying undirected graph.
    """

    def __init__(
        self,
        n: int,
        edges: Sequence[Tuple[int, int, float] | Edge],
        rotation: Optional[Sequence[Sequence[int]]] = None,
        directed: bool = False,
    ):
        self.n = n
        self.edges: List[Edge] = [
            e if isinstance(e, Edge) else Edge(e[0], e[1], float(e[2])) for e in edges
        ]
        self.directed = directed
        if rotation is None:
            rotation = _default_rotation(n, self.edges)
        self.rotation: List[List[int]] = [list(r) for r in rotation]
        self._csr: Optional[csr_matrix] = None
        self._csr_rev: Optional[csr_matrix] = None
        self._faces: Optional[List[List[int]]] = None

    # -- dart helpers ------------------------------------------------------

    def dart_tail(self, d: int) -> int:
        e = self.edges[d >> 1]
        return e.u if (d & 1) == 0 else e.v

    def dart_head(self, d: int) -> int:
        e = self.edges[d >> 1]
        return e.v if (d & 1) == 0 else e.u

    @property
    def m(self) -> int:
        return len(self.edges)

    def real_edges(self) -> List[int]:
        return [i for i, e in enumerate(self.edges) if not e.pseudo]

    def validate(self) -> None:
        seen = set()
        for v, rot in enumerate(self.rotation):
            for d in rot:
                if d in seen:
                    raise EmbeddingError(f"dart {d} listed twice")
                seen.add(d)
                if self.dart_tail(d) != v:
                    raise EmbeddingError(f"dart {d} in rotation of {v}, tail differs")
        if len(seen) != 2 * len(self.edges):
            raise EmbeddingError("rotation does not cover all darts")

    # -- faces -------------------------------------------------------------

    def _dart_positions(self) -> Dict[int, Tuple[int, int]]:
        pos = {}
        for v, rot in enumerate(self.rotation):
            for i, d in enumerate(rot):
                pos[d] = (v, i)
        return pos

    def face_cycles(self) -> List[List[int]]:
        """All faces as dart cycles; cached."""
        if self._faces is not None:
            return self._faces
        pos = self._dart_positions()
        visited = [False] * (2 * len(self.edges))
        faces = []
        for d0 in range(2 * len(self.edges)):
            if visited[d0]:
                continue
            cyc = []
            d = d0
            while not visited[d]:
                visited[d] = True
                cyc.append(d)
                r = d ^ 1
                v, i = pos[r]
                rot = self.rotation[v]
                d = rot[(i + 1) % len(rot)]
            faces.append(cyc)
        self._faces = faces
        return faces

    def check_euler(self) -> None:
        f = len(self.face_cycles()) if self.edges else 1
        if self.n - len(self.edges) + f != 2:
            raise EmbeddingError(
                f"not genus 0: V={self.n} E={len(self.edges)} F={f}"
            )

    # -- sparse matrices ---------------------------------------------------

    def csr(self, reverse: bool = False) -> csr_matrix:
        """Adjacency over real edges; symmetric unless directed."""
        if not reverse and self._csr is not None:
            return self._csr
        if reverse and self._csr_rev is not None:
            return self._csr_rev
        rows, cols, data = [], [], []
        for e in self.edges:
            if e.pseudo:
                continue
            if self.directed:
                if reverse:
                    rows.append(e.v), cols.append(e.u), data.append(e.w)
                else:
                    rows.append(e.u), cols.append(e.v), data.append(e.w)
            else:
                rows.extend((e.u, e.v))
                cols.extend((e.v, e.u))
                data.extend((e.w, e.w))
        mat = csr_matrix(
            (np.asarray(data, dtype=np.float64), (rows, cols)),
            shape=(self.n, self.n),
        )
        if reverse:
            self._csr_rev = mat
        else:
            self._csr = mat
        return mat

    def adjacency(self, reverse: bool = False):
        """adj[v] = list of (neighbor, weight, edge id) over real edges."""
        adj: List[List[Tuple[int, float, int]]] = [[] for _ in range(self.n)]
        for i, e in enumerate(self.edges):
            if e.pseudo:
                continue
            if self.directed:
                if reverse:
                    adj[e.v].append((e.u, e.w, i))
                else:
                    adj[e.u].append((e.v, e.w, i))
            else:
                adj[e.u].append((e.v, e.w, i))
                adj[e.v].append((e.u, e.w, i))
        return adj

    def subgraph(self, edge_ids: Iterable[int]) -> Tuple["PlanarGraph", List[int], Dict[int, int]]:
        """Subgraph induced by an edge subset, rotation order inherited.

        Returns (graph, old vertex ids by new id, old->new vertex map).  Edge
        i of the subgraph corresponds to the i-th id in sorted(edge_ids); the
        caller keeps that list for translating back.
        """
        eids = sorted(edge_ids)
        vset = set()
        for i in eids:
            e = self.edges[i]
            vset.add(e.u)
            vset.add(e.v)
        verts = sorted(vset)
        vmap = {v: i for i, v in enumerate(verts)}
        emap = {old: new for new, old in enumerate(eids)}
        edges = [
            Edge(vmap[self.edges[i].u], vmap[self.edges[i].v], self.edges[i].w,
                 self.edges[i].pseudo)
            for i in eids
        ]
        rot = []
        for v in verts:
            r = []
            for d in self.rotation[v]:
                if (d >> 1) in emap:
                    r.append(2 * emap[d >> 1] + (d & 1))
            rot.append(r)
        return PlanarGraph(len(verts), edges, rot, directed=self.directed), verts, vmap


def _default_rotation(n: int, edges: Sequence[Edge]) -> List[List[int]]:
    rot: List[List[int]] = [[] for _ in range(n)]
    for i, e in enumerate(edges):
        rot[e.u].append(2 * i)
        rot[e.v].append(2 * i + 1)
    return rot


# ---------------------------------------------------------------------------
# triangulation
# ---------------------------------------------------------------------------


def triangulate(g: PlanarGraph, pseudo_weight: float = INF) -> PlanarGraph:
    """Add pseudo edges until every face has exactly 3 edges.

    Faces are fan-triangulated from their minimum-id corner; when the face
    walk repeats vertices (bridges, non-2-connected graphs) the fan step that
    would create a self-loop falls back to the next safe ear in scan order.
    """
    edges = [Edge(e.u, e.v, e.w, e.pseudo) for e in g.edges]
    rotation = [list(r) for r in g.rotation]

    def tail(d: int) -> int:
        e = edges[d >> 1]
        return e.u if (d & 1) == 0 else e.v

    def head(d: int) -> int:
        e = edges[d >> 1]
        return e.v if (d & 1) == 0 else e.u

    base_faces = g.face_cycles()
    for face in base_faces:
        walk = list(face)
        while len(walk) > 3:
            k = len(walk)
            corners = [tail(d) for d in walk]
            # fan root: minimum-id corner; the fan cuts the corner after it
            s_pos = min(range(k), key=lambda i: corners[i])
            cut = None
            for off in range(k):
                i = (s_pos + 1 + off) % k  # corner to clip
                x = corners[i - 1] if i > 0 else corners[k - 1]
                z = corners[(i + 1) % k]
                if x != z:
                    cut = i
                    break
            if cut is None:
                raise EmbeddingError("face walk cannot be triangulated")
            i = cut
            d1 = walk[i - 1]          # x -> y
            d2 = walk[i]              # y -> z
            x, z = tail(d1), head(d2)
            eid = len(edges)
            edges.append(Edge(x, z, pseudo_weight, pseudo=True))
            a, b = 2 * eid, 2 * eid + 1
            rx = rotation[x]
            rx.insert(rx.index(d1), a)
            rz = rotation[z]
            rz.insert(rz.index(d2 ^ 1) + 1, b)
            j = i - 1 if i > 0 else k - 1
            if j < i:
                walk[j:i + 1] = [a]
            else:  # wrapped: d1 is last, d2 is first
                walk = [a] + walk[1:j]
        # len <= 3 faces are left as they are
    out = PlanarGraph(g.n, edges, rotation, directed=g.directed)
    out.check_euler()
    return out


# ---------------------------------------------------------------------------
# shortest paths
# ---------------------------------------------------------------------------


@dataclass
class ShortestPathTree:
    """SSSP tree with the orders used by separator and labeling code."""

    root: int
    dist: np.ndarray
    parent: np.ndarray          # parent vertex, -1 at root / unreachable
    parent_edge: np.ndarray     # edge id into parent, -1 likewise
    order: np.ndarray = field(default=None)      # preorder
    postorder: np.ndarray = field(default=None)
    pre_index: np.ndarray = field(default=None)  # vertex -> preorder position
    _lca: object = field(default=None, repr=False)
    _pmax: object = field(default=None, repr=False)

    def children(self) -> List[List[int]]:
        ch: List[List[int]] = [[] for _ in range(len(self.parent))]
        for v, p in enumerate(self.parent):
            if p >= 0:
                ch[p].append(v)
        return ch

    def tree_path(self, v: int) -> List[int]:
        """Vertices from v up to the root."""
        path = [v]
        while self.parent[path[-1]] >= 0:
            path.append(int(self.parent[path[-1]]))
        return path


def _resolve_parents(g: PlanarGraph, dist: np.ndarray, pred: np.ndarray,
                     reverse: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    """Turn scipy's predecessor vertices into (parent, parent edge) arrays.

    The parent edge must reproduce dist[v] == dist[p] + w bit-for-bit; among
    candidates the minimum edge id wins.
    """
    n = g.n
    parent = np.full(n, -1, dtype=np.int64)
    parent_edge = np.full(n, -1, dtype=np.int64)
    best: Dict[int, Tuple[float, int]] = {}
    for i, e in enumerate(g.edges):
        if e.pseudo:
            continue
        pairs = []
        if g.directed:
            if reverse:
                pairs.append((e.v, e.u))
            else:
                pairs.append((e.u, e.v))
        else:
            pairs.append((e.u, e.v))
            pairs.append((e.v, e.u))
        for a, b in pairs:
            if pred[b] == a:
                err = abs(dist[a] + e.w - dist[b])
                cur = best.get(b)
                if cur is None or (err, i) < cur:
                    best[b] = (err, i)
    for v, (err, i) in best.items():
        parent[v] = pred[v]
        parent_edge[v] = i
    return parent, parent_edge


def sssp(g: PlanarGraph, src: int, reverse: bool = False) -> ShortestPathTree:
    """Dijkstra tree from src over real edges; unreachable dist = +inf.

    ``reverse=True`` on a directed graph gives distances *to* src.
    """
    if g.n == 1:
        t = ShortestPathTree(src, np.zeros(1), np.full(1, -1), np.full(1, -1))
        _fill_orders(t)
        return t
    mat = g.csr(reverse=reverse)
    dist, pred = _csgraph_dijkstra(
        mat, directed=g.directed, indices=src, return_predecessors=True
    )
    pred = np.asarray(pred, dtype=np.int64)
    pred[pred < 0] = -1
    parent, parent_edge = _resolve_parents(g, dist, pred, reverse=reverse)
    t = ShortestPathTree(src, dist, parent, parent_edge)
    _fill_orders(t)
    return t


def _fill_orders(t: ShortestPathTree) -> None:
    n = len(t.parent)
    ch = t.children()
    order = []
    post = []
    stack = [(t.root, False)]
    while stack:
        v, done = stack.pop()
        if done:
            post.append(v)
            continue
        order.append(v)
        stack.append((v, True))
        for c in reversed(ch[v]):
            stack.append((c, False))
    t.order = np.asarray(order, dtype=np.int64)
    t.postorder = np.asarray(post, dtype=np.int64)
    pre_index = np.full(n, -1, dtype=np.int64)
    for i, v in enumerate(order):
        pre_index[v] = i
    t.pre_index = pre_index


def exact_distance(g: PlanarGraph, u: int, v: int) -> float:
    if u == v:
        return 0.0
    dist = _csgraph_dijkstra(g.csr(), directed=g.directed, indices=u)
    return float(dist[v])


def distance_matrix(g: PlanarGraph, sources: Optional[Sequence[int]] = None,
                    reverse: bool = False) -> np.ndarray:
    """Rows of the distance matrix for the given sources (all by default)."""
    mat = g.csr(reverse=reverse)
    if sources is None:
        d = _csgraph_dijkstra(mat, directed=g.directed)
    else:
        if len(sources) == 0:
            return np.zeros((0, g.n))
        d = _csgraph_dijkstra(mat, directed=g.directed, indices=list(sources))
        if d.ndim == 1:
            d = d[None, :]
    return d


def multi_source_distances(g: PlanarGraph, sources: Sequence[int],
                           reverse: bool = False) -> np.ndarray:
    """min over s in sources of d(s, v), via a weight-0 virtual source."""
    if len(sources) == 0:
        return np.full(g.n, INF)
    d = distance_matrix(g, sources, reverse=reverse)
    return d.min(axis=0)


# ---------------------------------------------------------------------------
# LCA and path maxima on shortest-path trees
# ---------------------------------------------------------------------------


class _EulerLca:
    """Euler tour + sparse-table range minimum: O(1) queries."""

    def __init__(self, parent: Sequence[int], root: int):
        n = len(parent)
        ch: List[List[int]] = [[] for _ in range(n)]
        for v, p in enumerate(parent):
            if p >= 0:
                ch[p].append(v)
        depth = [0] * n
        tour: List[int] = []
        first = [-1] * n
        # iterative Euler tour: (vertex, child index)
        it_stack: List[Tuple[int, int]] = [(root, 0)]
        while it_stack:
            v, i = it_stack.pop()
            if i == 0:
                first[v] = len(tour)
            tour.append(v)
            if i < len(ch[v]):
                it_stack.append((v, i + 1))
                c = ch[v][i]
                depth[c] = depth[v] + 1
                it_stack.append((c, 0))
        self.depth = depth
        self.first = first
        m = len(tour)
        table = [np.asarray([depth[v] for v in tour], dtype=np.int64)]
        node_table = [np.asarray(tour, dtype=np.int64)]
        k = 1
        while (1 << k) <= m:
            prev_d, prev_v = table[-1], node_table[-1]
            half = 1 << (k - 1)
            nd = np.minimum(prev_d[: m - (1 << k) + 1], prev_d[half: m - half + 1])
            pick = prev_d[: m - (1 << k) + 1] <= prev_d[half: m - half + 1]
            nv = np.where(pick, prev_v[: m - (1 << k) + 1], prev_v[half: m - half + 1])
            table.append(nd)
            node_table.append(nv)
            k += 1
        self._depths = table
        self._nodes = node_table

    def query(self, u: int, v: int) -> int:
        a, b = self.first[u], self.first[v]
        if a > b:
            a, b = b, a
        span = b - a + 1
        k = span.bit_length() - 1
        d1, d2 = self._depths[k][a], self._depths[k][b - (1 << k) + 1]
        if d1 <= d2:
            return int(self._nodes[k][a])
        return int(self._nodes[k][b - (1 << k) + 1])


def lca(t: ShortestPathTree, u: int, v: int) -> int:
    """O(1) lowest common ancestor after linear-ish preprocessing."""
    if t._lca is None:
        t._lca = _EulerLca(t.parent, t.root)
    return t._lca.query(u, v)


class _PathMax:
    """Binary lifting with (weight, -edge id) maxima along root paths."""

    def __init__(self, t: ShortestPathTree, weights: Sequence[float]):
        n = len(t.parent)
        self.t = t
        logn = max(1, (n).bit_length())
        up = np.full((logn, n), -1, dtype=np.int64)
        best = np.full((logn, n), -1, dtype=np.int64)  # edge ids
        w = weights
        up[0] = t.parent
        best[0] = t.parent_edge
        self.w = w
        for k in range(1, logn):
            for v in range(n):
                mid = up[k - 1][v]
                if mid < 0:
                    continue
                up[k][v] = up[k - 1][mid]
                e1, e2 = best[k - 1][v], best[k - 1][mid]
                best[k][v] = self._pick(e1, e2)
        self.up = up
        self.best = best

    def _pick(self, e1: int, e2: int) -> int:
        if e1 < 0:
            return e2
        if e2 < 0:
            return e1
        k1 = (self.w[e1], -e1)
        k2 = (self.w[e2], -e2)
        return e1 if k1 >= k2 else e2

    def climb(self, v: int, steps: int) -> Tuple[int, int]:
        e = -1
        k = 0
        while steps:
            if steps & 1:
                e = self._pick(e, int(self.best[k][v]))
                v = int(self.up[k][v])
            steps >>= 1
            k += 1
        return v, e


def path_max_edge(t: ShortestPathTree, u: int, v: int,
                  weights: Optional[Sequence[float]] = None,
                  g: Optional[PlanarGraph] = None) -> int:
    """Edge id of the maximum-weight edge on the tree path u..v.

    Ties broken toward the smaller edge id.  u == v has no edge and raises.
    """
    if u == v:
        raise ValueError("no edge on an empty path")
    if t._pmax is None:
        if weights is None:
            if g is None:
                raise ValueError("need edge weights on first call")
            weights = [e.w for e in g.edges]
        if t._lca is None:
            t._lca = _EulerLca(t.parent, t.root)
        t._pmax = _PathMax(t, weights)
    pm: _PathMax = t._pmax
    a = lca(t, u, v)
    depth = pm.t._lca.depth
    e_best = -1
    for x in (u, v):
        steps = depth[x] - depth[a]
        if steps > 0:
            _, e = pm.climb(x, steps)
            e_best = pm._pick(e_best, e)
    if e_best < 0:
        raise ValueError("vertices not connected in tree")
    return e_best


# ---------------------------------------------------------------------------
# ceiling modes
# ---------------------------------------------------------------------------


def ceil_ratio(d: float, w: float, mode: str = "native") -> int:
    """Minimal integer q with q*w >= d, exactly, for finite d >= 0, w > 0.

    mode="native" seeds with the ceiling instruction, mode="iterative" with
    the ceiling-free workaround (add w to itself until reaching d, counting
    steps; the step count is capped by the caller's context, at most |E|
    for the lookup tables).  Both modes finish with an exact rational fixup,
    so float dust in the division or the running sum cannot shift the result:
    the two modes always agree.
    """
    from fractions import Fraction

    if not (w > 0) or d < 0 or math.isinf(d) or math.isinf(w):
        raise ValueError("need finite d >= 0 and w > 0")
    if d == 0:
        return 0
    if mode == "native":
        q = math.ceil(d / w)
    elif mode == "iterative":
        acc = 0.0
        q = 0
        while acc < d:
            acc += w
            q += 1
    else:
        raise ValueError(f"unknown ceiling mode {mode!r}")
    fd, fw = Fraction(d), Fraction(w)
    while q * fw < fd:
        q += 1
    while q > 0 and (q - 1) * fw >= fd:
        q -= 1
    return q


# ---------------------------------------------------------------------------
# space ledger
# ---------------------------------------------------------------------------


class SpaceLedger:
    """Bit-exact accounting of every stored table; 64-bit words."""

    WORD = 64

    def __init__(self):
        self.entries: Dict[str, int] = {}

    def add(self, name: str, bits: int) -> None:
        if bits < 0:
            raise ValueError("negative bits")
        self.entries[name] = self.entries.get(name, 0) + int(bits)

    def merge(self, other: "SpaceLedger", prefix: str = "") -> None:
        for k, v in other.entries.items():
            self.add(prefix + k, v)

    @property
    def total_bits(self) -> int:
        return sum(self.entries.values())

    @property
    def total_words(self) -> int:
        return -(-self.total_bits // self.WORD)

    def words(self, name: str) -> int:
        return -(-self.entries.get(name, 0) // self.WORD)

    def report(self) -> str:
        lines = [f"{k}: {v} bits" for k, v in sorted(self.entries.items())]
        lines.append(f"total: {self.total_bits} bits = {self.total_words} words")
        return "\n".join(lines)

    def to_state(self):
        return dict(self.entries)

    @classmethod
    def from_state(cls, state) -> "SpaceLedger":
        led = cls()
        for k, v in state.items():
            led.add(k, v)
        return led


# ---------------------------------------------------------------------------
# generator
# ---------------------------------------------------------------------------


def generate_planar(
    n: int,
    seed: int = 0,
    weight_model: str = "uniform",
    delete_frac: float = 0.15,
    directed: bool = False,
) -> PlanarGraph:
    """Random connected embedded planar graph on n vertices.

    Delaunay triangulation of random unit-square points, followed by random
    edge deletions that keep the graph connected.  Weight models:

    - "unit":  every weight 1.0
    - "uniform":  weights uniform in (0.01, 1.0)
    - "exponential-spread":  weights 2**U(0, n/8), ratio up to 2**Theta(n)

    Directed graphs orient each kept edge at random and duplicate ~30% as
    antiparallel twins so that a usable fraction of pairs stays reachable.
    """
    rng = np.random.default_rng(seed)
    if n < 1:
        raise ValueError("n >= 1 required")
    if n == 1:
        return PlanarGraph(1, [], [[]], directed=directed)
    if n == 2:
        e = [Edge(0, 1, _draw_weights(rng, 1, n, weight_model)[0])]
        g = PlanarGraph(2, e, None, directed=directed)
        return g

    from scipy.spatial import Delaunay

    pts = rng.random((n, 2))
    tri = Delaunay(pts)
    pairs = set()
    for simplex in tri.simplices:
        a, b, c = int(simplex[0]), int(simplex[1]), int(simplex[2])
        for x, y in ((a, b), (b, c), (a, c)):
            pairs.add((min(x, y), max(x, y)))
    pairs = sorted(pairs)

    # delete random edges, keeping the graph connected
    keep = set(range(len(pairs)))
    order = rng.permutation(len(pairs))
    target = int(delete_frac * len(pairs))
    deleted = 0
    adj_sets: List[set] = [set() for _ in range(n)]
    for i, (u, v) in enumerate(pairs):
        adj_sets[u].add(i)
        adj_sets[v].add(i)
    for idx in order:
        if deleted >= target:
            break
        u, v = pairs[idx]
        keep.discard(idx)
        if _connected(n, pairs, keep, adj_sets):
            deleted += 1
        else:
            keep.add(idx)

    kept_pairs = [pairs[i] for i in sorted(keep)]
    weights = _draw_weights(rng, len(kept_pairs), n, weight_model)

    edges: List[Edge] = []
    if directed:
        for (u, v), w in zip(kept_pairs, weights):
            if rng.random() < 0.5:
                u, v = v, u
            edges.append(Edge(u, v, float(w)))
        extra = rng.random(len(kept_pairs)) < 0.3
        wx = _draw_weights(rng, int(extra.sum()), n, weight_model)
        j = 0
        twins = []
        for i, flag in enumerate(extra):
            if flag:
                e = edges[i]
                twins.append((i, Edge(e.v, e.u, float(wx[j]))))
                j += 1
    else:
        edges = [Edge(u, v, float(w)) for (u, v), w in zip(kept_pairs, weights)]
        twins = []

    # geometric rotation: neighbors sorted counterclockwise by angle
    rot: List[List[Tuple[float, int]]] = [[] for _ in range(n)]
    for i, e in enumerate(edges):
        au = math.atan2(pts[e.v][1] - pts[e.u][1], pts[e.v][0] - pts[e.u][0])
        av = math.atan2(pts[e.u][1] - pts[e.v][1], pts[e.u][0] - pts[e.v][0])
        rot[e.u].append((au, 2 * i))
        rot[e.v].append((av, 2 * i + 1))
    rotation = [[d for _, d in sorted(r)] for r in rot]

    if twins:
        # splice each antiparallel twin right after its sibling's dart
        base = len(edges)
        for k, (i, te) in enumerate(twins):
            edges.append(te)
        for k, (i, te) in enumerate(twins):
            # bigon: twin dart after sibling dart at one end, before its
            # reverse at the other, else the twin crosses the edge
            eid = base + k
            ru = rotation[te.v]  # tail of dart 2*i is edges[i].u == te.v
            ru.insert(ru.index(2 * i) + 1, 2 * eid + 1)
            rv = rotation[te.u]
            rv.insert(rv.index(2 * i + 1), 2 * eid)
    g = PlanarGraph(n, edges, rotation, directed=directed)
    g.check_euler()
    return g


def _draw_weights(rng, m: int, n: int, model: str) -> np.ndarray:
    if model == "unit":
        return np.ones(m)
    if model == "uniform":
        return 0.01 + 0.99 * rng.random(m)
    if model == "exponential-spread":
        return np.exp2(rng.random(m) * (n / 8.0))
    raise ValueError(f"unknown weight model {model!r}")


def _connected(n: int, pairs, keep: set, adj_sets) -> bool:
    if n == 0:
        return True
    seen = [False] * n
    stack = [0]
    seen[0] = True
    cnt = 1
    while stack:
        v = stack.pop()
        for i in adj_sets[v]:
            if i not in keep:
                continue
            u0, v0 = pairs[i]
            w = v0 if u0 == v else u0
            if not seen[w]:
                seen[w] = True
                cnt += 1
                stack.append(w)
    return cnt == n


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------


def _fmt_weight(w: float) -> str:
    if w == INF:
        return "inf"
    return repr(w)


def save_graph(g: PlanarGraph, path: str) -> None:
    """Writer for the `pg` text format; round-trips bit-exactly."""
    with open(path, "w") as f:
        head = f"pg {g.n} {len(g.edges)}"
        if g.directed:
            head += " directed"
        f.write(head + "\n")
        for e in g.edges:
            line = f"e {e.u} {e.v} {_fmt_weight(e.w)}"
            if e.pseudo:
                line += " pseudo"
            f.write(line + "\n")
        for v in range(g.n):
            f.write("rot " + str(v) + " " + " ".join(map(str, g.rotation[v])) + "\n")


def load_graph(path: str) -> PlanarGraph:
    n = m = None
    directed = False
    edges: List[Edge] = []
    rotation: Optional[List[List[int]]] = None
    with open(path) as f:
        for raw in f:
            parts = raw.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "pg":
                n, m = int(parts[1]), int(parts[2])
                directed = "directed" in parts[3:]
                rotation = [[] for _ in range(n)]
            elif parts[0] == "e":
                w = INF if parts[3] == "inf" else float(parts[3])
                edges.append(Edge(int(parts[1]), int(parts[2]), w,
                                  pseudo=(len(parts) > 4 and parts[4] == "pseudo")))
            elif parts[0] == "rot":
                v = int(parts[1])
                rotation[v] = [int(x) for x in parts[2:]]
            else:
                raise ValueError(f"bad line in graph file: {raw!r}")
    if n is None:
        raise ValueError("missing pg header")
    if len(edges) != m:
        raise ValueError(f"expected {m} edges, found {len(edges)}")
    # every dart must be present: arbitrary edge lists are not embedded here
    if edges:
        total = sum(len(r) for r in rotation)
        if total != 2 * len(edges):
            raise ValueError("graph file lacks complete rot lines; embeddings "
                             "for arbitrary edge lists are not computed")
    g = PlanarGraph(n, edges, rotation, directed=directed)
    g.validate()
    return g
