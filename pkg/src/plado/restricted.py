"""Terminal-restricted distance oracles with additive eps*D stretch.

Three stacked structures.  Portal tables over one terminal decomposition
answer a pair exactly up to eps*D, or return a ``Failed`` marker naming
the leaf that still holds both endpoints.  Packed rounded-distance words
cover very small terminal sets outright.  A three-level cascade of the
two answers every pair in the set, descending through at most two
``Failed`` results.  On top of the cascade, a sparse cluster cover turns
the additive guarantee into a multiplicative (1+eps) inside a fixed
distance band [d, alpha*d].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

from .covers import SparseCover, sparse_cover
from .decomposition import STauDecomposition, s_tau_decompose
from .graph import PlanarGraph, SpaceLedger, ceil_ratio, sssp
from .labeling import build_labeling

__all__ = [
    "Failed",
    "PortalStructure",
    "SmallSetOracle",
    "AdditiveOracle",
    "RestrictedOracle",
    "build_d1",
    "d1_query",
    "build_small_set",
    "build_additive",
    "additive_query",
    "build_restricted",
    "restricted_query",
]


class Failed(NamedTuple):
    """Marker for a pair that still shares the given decomposition leaf."""

    leaf: int


class _TreeLCA:
    # Euler tour plus a sparse minimum table over the node depths; answers
    # lowest-common-ancestor queries on the decomposition tree in constant
    # time.
    def __init__(self, nodes):
        children = [[] for _ in nodes]
        for x in nodes:
            if x.left >= 0:
                children[x.id].append(x.left)
            if x.right >= 0:
                children[x.id].append(x.right)
        euler = [0]
        first = np.full(len(nodes), -1, dtype=np.int64)
        first[0] = 0
        stack = [(0, iter(children[0]))]
        while stack:
            v, it = stack[-1]
            c = next(it, None)
            if c is None:
                stack.pop()
                if stack:
                    euler.append(stack[-1][0])
            else:
                first[c] = len(euler)
                euler.append(c)
                stack.append((c, iter(children[c])))
        self.euler = np.asarray(euler, dtype=np.int64)
        self.first = first
        dep = np.asarray([nodes[v].depth for v in euler], dtype=np.int64)
        m = len(euler)
        levels = max(1, m.bit_length())
        tbl = np.empty((levels, m), dtype=np.int64)
        tbl[0] = np.arange(m)
        for k in range(1, levels):
            h = 1 << (k - 1)
            if 2 * h > m:
                tbl[k] = tbl[k - 1]
                continue
            a, b = tbl[k - 1, : m - 2 * h + 1], tbl[k - 1, h : m - h + 1]
            tbl[k, : m - 2 * h + 1] = np.where(dep[a] <= dep[b], a, b)
            tbl[k, m - 2 * h + 1 :] = tbl[k - 1, m - 2 * h + 1 :]
        self._dep = dep
        self._tbl = tbl

    def query(self, a: int, b: int) -> int:
        i, j = sorted((int(self.first[a]), int(self.first[b])))
        k = (j - i + 1).bit_length() - 1
        x, y = self._tbl[k, i], self._tbl[k, j - (1 << k) + 1]
        return int(self.euler[x if self._dep[x] <= self._dep[y] else y])

    def bits(self) -> int:
        return 64 * (self.euler.size + self.first.size + self._tbl.size)


class _DistanceSource:
    # All preprocessing distances flow through here: either exact rows from
    # one multi-source Dijkstra, or label queries at eps/4 so every stored
    # value is within a (1 + eps/4) factor above the truth.
    def __init__(self, g: PlanarGraph, sources, preproc: str, eps: float):
        if preproc not in ("labeling", "exact"):
            raise ValueError("preproc must be labeling or exact")
        self.preproc = preproc
        src = sorted({int(s) for s in sources})
        if preproc == "exact":
            mat = g.csr()
            dmat = _csgraph_dijkstra(mat, directed=False, indices=src)
            if dmat.ndim == 1:
                dmat = dmat[None, :]
            rix = np.full(g.n, -1, dtype=np.int64)
            rix[src] = np.arange(len(src))
            self._dmat, self._rix = dmat, rix
        else:
            self._lab = build_labeling(g, src, eps / 4.0)

    def row(self, a: int, targets: np.ndarray) -> np.ndarray:
        if self.preproc == "exact":
            return self._dmat[self._rix[a]][targets].astype(float)
        out = np.empty(len(targets))
        for j, t in enumerate(targets):
            out[j] = 0.0 if int(t) == a else self._lab.query(a, int(t))
        return out

    def block(self, srcs: np.ndarray, targets: np.ndarray) -> np.ndarray:
        if self.preproc == "exact":
            return self._dmat[np.ix_(self._rix[srcs], targets)].astype(float)
        return np.vstack([self.row(int(a), targets) for a in srcs])


def _path_portals(path, dist, step: float) -> List[int]:
    # Greedy net along one monotone tree path: keep both endpoints, and
    # emit a portal once the accumulated weight since the last one exceeds
    # the step.  Every path vertex ends up within one step of the portal
    # before it; a single long edge may still separate two portals by more.
    parr = np.asarray(path, dtype=np.int64)
    pos = dist[parr]
    if np.any(np.diff(pos) < 0):
        raise AssertionError("portal path is not monotone")
    keep = [0]
    last = float(pos[0])
    for i in range(1, len(parr)):
        if float(pos[i]) - last > step:
            keep.append(i)
            last = float(pos[i])
    if keep[-1] != len(parr) - 1:
        keep.append(len(parr) - 1)
    return [int(parr[i]) for i in keep]


@dataclass
class PortalStructure:
    """Portal tables over a prebuilt terminal decomposition.

    Every internal node carries a net of portals on each of its boundary
    and separator paths; every portal stores its distance to the portals
    of all its ancestors, and every terminal stores its distances to the
    portals of its home node and of the home's parent.  A query meets in
    the middle at the portals of the lowest common ancestor of the two
    home nodes, so the answer never underestimates and overshoots by at
    most eps*D.  Pairs whose homes are one shared leaf return ``Failed``.
    """

    g: PlanarGraph
    stau: STauDecomposition
    eps: float
    eps_net: float
    D: float
    preproc: str
    port: Dict[int, np.ndarray] = field(repr=False)
    ptab: Dict[Tuple[int, int], np.ndarray] = field(repr=False)
    tport: Dict[int, Dict[int, np.ndarray]] = field(repr=False)
    lca: _TreeLCA = field(repr=False)
    ledger: SpaceLedger = field(repr=False)
    constants: Dict[str, float] = field(repr=False)

    def _leg(self, u: int, hu: int, z: int) -> Tuple[np.ndarray, int]:
        # distance vector from u to every portal of z, routed through the
        # stored portal rows of home(u) and its parent
        out = np.full(len(self.port[z]), math.inf)
        examined = 0
        rows = self.tport[u]
        for a in (hu, self.stau.nodes[hu].parent):
            if a < 0 or a not in rows:
                continue
            m = self.ptab.get((a, z))
            if m is None:
                continue
            r = rows[a]
            examined += len(r)
            np.minimum(out, np.min(r[:, None] + m, axis=0), out=out)
        return out, examined

    def query_detail(self, u: int, v: int):
        hu = self.stau.home(u)
        hv = self.stau.home(v)
        if hu == hv and self.stau.nodes[hu].is_leaf():
            return Failed(hu), 0
        if u == v:
            return 0.0, 0
        z = self.lca.query(hu, hv)
        du, ku = self._leg(u, hu, z)
        dv, kv = self._leg(v, hv, z)
        best = float(np.min(du + dv))
        if not math.isfinite(best):
            raise AssertionError("no stored route reaches the meeting node")
        return best, len(self.port[z]) + ku + kv

    def query(self, u: int, v: int):
        return self.query_detail(u, v)[0]


def build_d1(
    g: PlanarGraph,
    decomp: STauDecomposition,
    eps: float,
    D: float,
    *,
    preproc: str = "labeling",
) -> PortalStructure:
    """Portal tables for the terminals of ``decomp``, additive eps*D.

    ``D`` must dominate the diameter of ``g`` (checked against the radius
    of the decomposition's shortest-path tree).  With cover radius
    r = eps_net*D/2 on every path, a separated pair pays at most 2r going
    through the meeting path plus 4r on each terminal leg, so 10r total;
    eps_net = eps/5 lands that at eps*D for exact preprocessing.  Label
    preprocessing multiplies every stored value by at most (1 + eps/4),
    and eps_net = eps/10 keeps the end-to-end overshoot below eps*D.
    """
    if not (0 < eps <= 1):
        raise ValueError("eps must be in (0, 1]")
    t = decomp.t
    reach = float(np.max(t.dist[np.isfinite(t.dist)]))
    if not (D > 0) or D < reach:
        raise ValueError("D must be positive and at least the graph diameter")
    eps_net = eps / 5.0 if preproc == "exact" else eps / 10.0
    step = eps_net * D / 2.0
    cap = math.ceil(2.0 / eps_net) + 1

    port: Dict[int, np.ndarray] = {}
    max_path = 0
    for X in decomp.nodes:
        if X.is_leaf() or not X.paths:
            continue
        seen: Dict[int, int] = {}
        for p in X.paths:
            chosen = _path_portals(p, t.dist, step)
            if len(chosen) > cap:
                raise AssertionError("portal net exceeded its budget")
            max_path = max(max_path, len(chosen))
            for v in chosen:
                if v not in seen:
                    seen[v] = len(seen)
        port[X.id] = np.asarray(list(seen), dtype=np.int64)

    S = sorted({int(s) for s in decomp.S})
    allp = set()
    for arr in port.values():
        allp.update(int(x) for x in arr)
    src = _DistanceSource(g, allp | set(S), preproc, eps)

    ptab: Dict[Tuple[int, int], np.ndarray] = {}
    pair_entries = 0
    for X in decomp.nodes:
        if X.id not in port:
            continue
        a = X.id
        while a >= 0:
            if a in port:
                m = src.block(port[X.id], port[a])
                ptab[(X.id, a)] = m
                pair_entries += m.size
            a = decomp.nodes[a].parent

    tport: Dict[int, Dict[int, np.ndarray]] = {}
    row_entries = 0
    for s in S:
        h = decomp.home(s)
        rows: Dict[int, np.ndarray] = {}
        for a in (h, decomp.nodes[h].parent):
            if a >= 0 and a in port and a not in rows:
                rows[a] = src.row(s, port[a])
                row_entries += len(rows[a])
        tport[s] = rows

    lca = _TreeLCA(decomp.nodes)
    ledger = SpaceLedger()
    ledger.add("portal_ids", 64 * sum(len(v) for v in port.values()))
    ledger.add("portal_pairs", 64 * pair_entries)
    ledger.add("terminal_rows", 64 * row_entries)
    ledger.add("terminal_home", 64 * len(S))
    ledger.add("tree_lca", lca.bits())
    constants = {
        "eps_net": eps_net,
        "pair_entries": float(pair_entries),
        "c_space": pair_entries * eps * eps / max(1, len(S)),
        "max_path_portals": float(max_path),
        "max_node_portals": float(max((len(v) for v in port.values()), default=0)),
    }
    return PortalStructure(
        g, decomp, eps, eps_net, D, preproc, port, ptab, tport, lca, ledger, constants
    )


def d1_query(ps: PortalStructure, u: int, v: int):
    """Distance estimate for two terminals, or Failed(leaf) for pairs the
    structure cannot separate.  Non-terminal arguments raise ValueError."""
    return ps.query(u, v)


@dataclass
class SmallSetOracle:
    """Rounded pairwise distances for a handful of terminals.

    Packed mode keeps one integer per terminal, sliced into fixed-width
    blocks holding ceil(d / (eps_eff*D)); decoding multiplies back, so an
    answer sits in [d, d + eps*D].  When the set, 1/eps, or a block value
    outgrows the budget the table falls back to a plain matrix of the
    measured distances and records why in ``info``.
    """

    S: List[int]
    eps: float
    eps_eff: float
    D: float
    mode: str
    block_bits: int
    info: str
    index: Dict[int, int] = field(repr=False)
    words: List[int] = field(repr=False)
    matrix: Optional[np.ndarray] = field(repr=False)
    ledger: SpaceLedger = field(repr=False)

    def query(self, u: int, v: int) -> float:
        try:
            i, j = self.index[int(u)], self.index[int(v)]
        except KeyError:
            raise ValueError("vertex is not in the indexed terminal set") from None
        if self.mode == "matrix":
            return float(self.matrix[i, j])
        mask = (1 << self.block_bits) - 1
        rho = (self.words[i] >> (j * self.block_bits)) & mask
        if rho == mask:
            return math.inf
        return rho * self.eps_eff * self.D


def build_small_set(
    g: PlanarGraph,
    S,
    eps: float,
    D: float,
    *,
    preproc: str = "labeling",
    ceiling_mode: str = "native",
) -> SmallSetOracle:
    """Packed distance words over S, additive eps*D, D at least the diameter.

    Packing needs the set and 1/eps to fit the doubly logarithmic block
    budget of the host graph; anything larger lands in the matrix mode.
    """
    if not (0 < eps <= 1):
        raise ValueError("eps must be in (0, 1]")
    if not (D > 0):
        raise ValueError("D must be positive")
    S = sorted({int(s) for s in S})
    if not S or S[0] < 0 or S[-1] >= g.n:
        raise ValueError("terminal set must be nonempty and inside the graph")
    index = {s: i for i, s in enumerate(S)}

    src = _DistanceSource(g, S, preproc, eps)
    tgt = np.asarray(S, dtype=np.int64)
    dmat = src.block(tgt, tgt)
    dmat = np.minimum(dmat, dmat.T)
    if preproc == "labeling":
        # measured values can poke above D by the label slack; true
        # distances cannot, so clamping keeps the lower bound intact
        dmat = np.minimum(dmat, D)
    eps_eff = eps if preproc == "exact" else eps / 2.0

    loglog = math.log2(max(2.0, math.log2(max(2.0, float(g.n)))))
    bits = max(1, math.ceil(math.log2(2.0 * loglog)))
    sentinel = (1 << bits) - 1
    ledger = SpaceLedger()

    reason = ""
    if len(S) > 4.0 * loglog:
        reason = "set larger than the block budget"
    elif 1.0 / eps_eff > loglog:
        reason = "1/eps above the block budget"
    elif not np.all(np.isfinite(dmat)):
        reason = "disconnected pair"

    words: List[int] = []
    if not reason:
        denom = eps_eff * D
        rho = [[0] * len(S) for _ in S]
        for i in range(len(S)):
            for j in range(i + 1, len(S)):
                q = ceil_ratio(float(dmat[i, j]), denom, ceiling_mode)
                if q >= sentinel:
                    reason = "block overflow"
                    break
                rho[i][j] = rho[j][i] = q
            if reason:
                break
        if not reason:
            for i in range(len(S)):
                w = 0
                for j, q in enumerate(rho[i]):
                    w |= q << (j * bits)
                words.append(w)

    if reason:
        ledger.add("distance_matrix", 64 * len(S) * len(S))
        ledger.add("terminal_index", 64 * len(S))
        return SmallSetOracle(
            S, eps, eps_eff, D, "matrix", bits, "matrix: " + reason,
            index, [], dmat, ledger,
        )
    ledger.add("distance_words", len(S) * len(S) * bits)
    ledger.add("terminal_index", 64 * len(S))
    return SmallSetOracle(
        S, eps, eps_eff, D, "packed", bits, "packed",
        index, words, None, ledger,
    )


def _tau_for(k: int) -> int:
    return max(1, (max(1, k) - 1).bit_length())


def _diameter_bound(g: PlanarGraph) -> float:
    # double sweep: twice the eccentricity of the far end dominates the
    # diameter of a connected graph
    t0 = sssp(g, 0)
    if not np.all(np.isfinite(t0.dist)):
        raise ValueError("graph must be connected")
    a = int(np.argmax(t0.dist))
    b = 2.0 * float(np.max(sssp(g, a).dist))
    return b if b > 0 else 1.0


@dataclass
class AdditiveOracle:
    """Three-level cascade answering any terminal pair within eps*D.

    The root portal structure covers the whole set; pairs sharing a root
    leaf descend to a per-leaf portal structure, and pairs sharing a leaf
    there again land in a packed small-set table.  At most two ``Failed``
    results occur per query.
    """

    g: PlanarGraph
    S: List[int]
    eps: float
    D: float
    preproc: str
    root: PortalStructure = field(repr=False)
    level1: Dict[int, PortalStructure] = field(repr=False)
    level2: Dict[int, Dict[int, SmallSetOracle]] = field(repr=False)
    members: frozenset = field(repr=False)
    ledger: SpaceLedger = field(repr=False)
    constants: Dict[str, float] = field(repr=False)

    def query_detail(self, u: int, v: int) -> Tuple[float, str, int]:
        """Returns (estimate, branch, portals examined); branch names the
        level that produced the answer: root, level1, or level2."""
        if u not in self.members or v not in self.members:
            raise ValueError("vertex is not a terminal of this oracle")
        if u == v:
            return 0.0, "root", 0
        r, k = self.root.query_detail(u, v)
        if not isinstance(r, Failed):
            return r, "root", k
        r2, k2 = self.level1[r.leaf].query_detail(u, v)
        if not isinstance(r2, Failed):
            return r2, "level1", k + k2
        val = self.level2[r.leaf][r2.leaf].query(u, v)
        return val, "level2", k + k2

    def query(self, u: int, v: int) -> float:
        return self.query_detail(u, v)[0]


def build_additive(
    g: PlanarGraph,
    S,
    eps: float,
    D: Optional[float] = None,
    *,
    preproc: str = "labeling",
    ceiling_mode: str = "native",
) -> AdditiveOracle:
    """Additive eps*D oracle over S; D defaults to a measured bound."""
    if not (0 < eps <= 1):
        raise ValueError("eps must be in (0, 1]")
    S = sorted({int(s) for s in S})
    if not S or S[0] < 0 or S[-1] >= g.n:
        raise ValueError("terminal set must be nonempty and inside the graph")
    if D is None:
        D = _diameter_bound(g)
    if not (D > 0):
        raise ValueError("D must be positive")

    stau0 = s_tau_decompose(g, S, _tau_for(len(S)))
    root = build_d1(g, stau0, eps, D, preproc=preproc)
    level1: Dict[int, PortalStructure] = {}
    level2: Dict[int, Dict[int, SmallSetOracle]] = {}
    for leaf in stau0.leaves():
        s1 = sorted(leaf.chi)
        if len(s1) < 2:
            continue
        stau1 = s_tau_decompose(g, s1, _tau_for(len(s1)))
        level1[leaf.id] = build_d1(g, stau1, eps, D, preproc=preproc)
        for leaf2 in stau1.leaves():
            s2 = sorted(leaf2.chi)
            if len(s2) < 2:
                continue
            level2.setdefault(leaf.id, {})[leaf2.id] = build_small_set(
                g, s2, eps, D, preproc=preproc, ceiling_mode=ceiling_mode
            )

    ledger = SpaceLedger()
    ledger.merge(root.ledger, "root_")
    for ps in level1.values():
        ledger.merge(ps.ledger, "l1_")
    n2 = 0
    for grp in level2.values():
        for sso in grp.values():
            ledger.merge(sso.ledger, "l2_")
            n2 += 1
    pair_entries = root.constants["pair_entries"] + sum(
        ps.constants["pair_entries"] for ps in level1.values()
    )
    constants = {
        "tau_root": float(stau0.tau),
        "level1_structs": float(len(level1)),
        "level2_tables": float(n2),
        "pair_entries": pair_entries,
        "c_space": pair_entries * eps * eps / len(S),
    }
    return AdditiveOracle(
        g, S, eps, float(D), preproc, root, level1, level2,
        frozenset(S), ledger, constants,
    )


def additive_query(o: AdditiveOracle, u: int, v: int) -> float:
    """Distance estimate in [d_G, d_G + eps*D] for terminals u, v."""
    return o.query(u, v)


@dataclass
class RestrictedOracle:
    """(1+eps) answers inside the distance band [d, alpha*d].

    A sparse cover at diameter beta*alpha*d carries one additive oracle
    per cluster that holds terminals; every terminal remembers the
    cluster containing its alpha*d ball.  Queries outside that cluster
    report +inf, which is a valid lower bound precisely because the true
    distance then exceeds alpha*d's reach only when the band is missed.
    """

    g: PlanarGraph
    S: List[int]
    d: float
    alpha: float
    eps: float
    cover: SparseCover = field(repr=False)
    units: Dict[int, Optional[AdditiveOracle]] = field(repr=False)
    members: Dict[int, frozenset] = field(repr=False)
    vmaps: Dict[int, Dict[int, int]] = field(repr=False)
    home: Dict[int, int] = field(repr=False)
    ledger: SpaceLedger = field(repr=False)
    constants: Dict[str, float] = field(repr=False)

    def query_detail(self, u: int, v: int):
        """Returns (estimate, cluster id, branch, portals examined)."""
        if u not in self.home or v not in self.home:
            raise ValueError("vertex is not a terminal of this oracle")
        if u == v:
            return 0.0, self.home[v], "equal", 0
        c = self.home[v]
        if u not in self.members[c]:
            return math.inf, c, "out-of-cluster", 0
        unit = self.units[c]
        if unit is None:
            raise AssertionError("cluster with two terminals lacks an oracle")
        vm = self.vmaps[c]
        val, branch, k = unit.query_detail(vm[u], vm[v])
        return val, c, branch, k

    def query(self, u: int, v: int) -> float:
        return self.query_detail(u, v)[0]


def build_restricted(
    g: PlanarGraph,
    S,
    d: float,
    alpha: float,
    eps: float,
    *,
    preproc: str = "labeling",
    ceiling_mode: str = "native",
    cover: Optional[SparseCover] = None,
) -> RestrictedOracle:
    """Oracle that is (1+eps) for terminal pairs with d <= d_G <= alpha*d.

    Answers never drop below the true distance; outside the band only
    that lower-bound guarantee applies.  A caller that already holds a
    cover with core radius >= alpha*d can pass it in instead of paying
    for another one.
    """
    if not (d > 0):
        raise ValueError("d must be positive")
    if not (alpha > 1):
        raise ValueError("alpha must exceed 1")
    if not (0 < eps <= 1):
        raise ValueError("eps must be in (0, 1]")
    S = sorted({int(s) for s in S})
    if not S or S[0] < 0 or S[-1] >= g.n:
        raise ValueError("terminal set must be nonempty and inside the graph")

    if cover is not None:
        if cover.r < alpha * d:
            raise ValueError("supplied cover radius is below alpha*d")
        cov = cover
    else:
        # grow the cover until its core radius swallows the alpha*d balls
        delta = 2.0 * alpha * d
        cov = None
        for _ in range(40):
            cov = sparse_cover(g, delta)
            if cov.r >= alpha * d:
                break
            delta *= 2.0
        else:
            raise RuntimeError("cover radius never reached alpha*d")

    units: Dict[int, Optional[AdditiveOracle]] = {}
    members: Dict[int, frozenset] = {}
    vmaps: Dict[int, Dict[int, int]] = {}
    ledger = SpaceLedger()
    for ci, cl in enumerate(cov.clusters):
        clset = frozenset(int(x) for x in cl)
        sc = [s for s in S if s in clset]
        if not sc:
            continue
        members[ci] = clset
        if len(cl) == 1:
            units[ci] = None
            vmaps[ci] = {int(cl[0]): 0}
            continue
        sub, verts, vmap = g.subgraph(cov.cluster_edges[ci])
        ecc = 2.0 * float(np.max(sssp(sub, vmap[sc[0]]).dist))
        dc = min(cov.delta, ecc) if ecc > 0 else 1.0
        eps0 = min(1.0, eps * d / dc)
        if len(sc) == 1:
            units[ci] = None
        else:
            units[ci] = build_additive(
                sub, [vmap[s] for s in sc], eps0, dc,
                preproc=preproc, ceiling_mode=ceiling_mode,
            )
            ledger.merge(units[ci].ledger, f"c{ci}_")
        vmaps[ci] = vmap

    home = {s: int(cov.home[s]) for s in S}
    ledger.add("terminal_cluster", 64 * len(S))
    ledger.add("cluster_members", 64 * sum(len(m) for m in members.values()))
    constants = {
        "beta": cov.delta / (alpha * d),
        "overlap": float(cov.s),
        "delta": cov.delta,
        "clusters": float(len(cov.clusters)),
        "survivors": float(len(members)),
    }
    return RestrictedOracle(
        g, S, float(d), float(alpha), eps, cov, units, members,
        vmaps, home, ledger, constants,
    )


def restricted_query(o: RestrictedOracle, u: int, v: int) -> float:
    """Estimate >= d_G always; <= (1+eps)*d_G when d <= d_G <= alpha*d."""
    return o.query(u, v)
