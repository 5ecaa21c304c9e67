"""Independent reference implementations used to check the library.

Everything here is deliberately written from scratch on top of the stdlib:
the library computes distances through scipy, these oracles use plain
Bellman-Ford / heapq, so agreement is meaningful.
"""

import heapq
import math

INF = math.inf


def edge_list(g):
    """(u, v, w) triples over real edges of a PlanarGraph-like object."""
    out = []
    for e in g.edges:
        if getattr(e, "pseudo", False):
            continue
        out.append((e.u, e.v, e.w))
    return out


def bellman_ford(n, edges, src, directed=False):
    """Distances from src; edges = (u, v, w) triples."""
    dist = [INF] * n
    dist[src] = 0.0
    for _ in range(n - 1):
        changed = False
        for u, v, w in edges:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
            if not directed and dist[v] + w < dist[u]:
                dist[u] = dist[v] + w
                changed = True
        if not changed:
            break
    return dist


def dijkstra_heap(n, edges, src, directed=False):
    adj = [[] for _ in range(n)]
    for u, v, w in edges:
        adj[u].append((v, w))
        if not directed:
            adj[v].append((u, w))
    dist = [INF] * n
    dist[src] = 0.0
    pq = [(0.0, src)]
    while pq:
        d, v = heapq.heappop(pq)
        if d > dist[v]:
            continue
        for u, w in adj[v]:
            nd = d + w
            if nd < dist[u]:
                dist[u] = nd
                heapq.heappush(pq, (nd, u))
    return dist


def all_pairs(n, edges, directed=False):
    return [dijkstra_heap(n, edges, s, directed) for s in range(n)]


def naive_lca(parent, u, v):
    anc = set()
    x = u
    while x >= 0:
        anc.add(x)
        x = parent[x]
    x = v
    while x not in anc:
        x = parent[x]
    return x


def naive_path_max(parent, parent_edge, weights, u, v):
    """Max-weight edge id on tree path u..v; ties -> smaller id."""
    a = naive_lca(parent, u, v)
    best = None
    for x in (u, v):
        while x != a:
            e = parent_edge[x]
            key = (weights[e], -e)
            if best is None or key > best:
                best = key
            x = parent[x]
    if best is None:
        raise ValueError("u == v")
    return -best[1]


def naive_weighted_ancestor(parent, wdepth, v, d):
    """Deepest ancestor of v (inclusive) with weighted depth <= d."""
    x = v
    while x >= 0 and wdepth[x] > d:
        x = parent[x]
    return x


def trace_faces(n, edge_ends, rotation):
    """Independent face tracing.

    edge_ends[i] = (u, v); rotation[v] = dart list (dart 2i tail u, 2i+1
    tail v).  Returns the list of face walks as dart lists.
    """
    pos = {}
    for v, rot in enumerate(rotation):
        for i, d in enumerate(rot):
            pos[d] = (v, i)

    def head(d):
        u, v = edge_ends[d >> 1]
        return v if (d & 1) == 0 else u

    m2 = 2 * len(edge_ends)
    seen = [False] * m2
    faces = []
    for d0 in range(m2):
        if seen[d0]:
            continue
        walk = []
        d = d0
        while not seen[d]:
            seen[d] = True
            walk.append(d)
            r = d ^ 1
            v, i = pos[r]
            rot = rotation[v]
            d = rot[(i + 1) % len(rot)]
        faces.append(walk)
    return faces


def connected_components(n, edges):
    par = list(range(n))

    def find(x):
        while par[x] != x:
            par[x] = par[par[x]]
            x = par[x]
        return x

    for u, v, _ in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            par[ru] = rv
    comps = {}
    for v in range(n):
        comps.setdefault(find(v), []).append(v)
    return list(comps.values())


def cycle_sides(n, edge_ends, rotation, cycle_darts):
    """Split vertices off a simple directed cycle into its two sides.

    cycle_darts = darts d_i walking the cycle; dart d = 2*e + parity with
    tail/head given by edge_ends[e].  At each cycle vertex the darts lying
    counterclockwise strictly between the outgoing cycle dart and the
    reverse of the incoming one point left of the walk; everything else
    points right.  Components of the graph minus the cycle inherit the side
    of any dart reaching them; mixed labels raise.
    """

    def tail(d):
        u, v = edge_ends[d >> 1]
        return u if (d & 1) == 0 else v

    def head(d):
        u, v = edge_ends[d >> 1]
        return v if (d & 1) == 0 else u

    cyc_vertices = [tail(d) for d in cycle_darts]
    cyc_set = set(cyc_vertices)
    L = len(cycle_darts)
    side_of_dart = {}
    for i in range(L):
        x = head(cycle_darts[i])
        d_out = cycle_darts[(i + 1) % L]
        d_in_rev = cycle_darts[i] ^ 1
        rot = rotation[x]
        j = rot.index(d_out)
        cur = "L"
        for step in range(1, len(rot)):
            d = rot[(j + step) % len(rot)]
            if d == d_in_rev:
                cur = "R"
                continue
            side_of_dart[d] = cur

    keep = []
    for e, (u, v) in enumerate(edge_ends):
        if u not in cyc_set and v not in cyc_set:
            keep.append((u, v, 1.0))
    comp_of = {}
    for comp in connected_components(n, keep):
        free = [v for v in comp if v not in cyc_set]
        for v in free:
            comp_of[v] = free[0]
    label = {}
    for d, s in side_of_dart.items():
        y = head(d)
        if y in cyc_set:
            continue
        c = comp_of[y]
        if c in label and label[c] != s:
            raise AssertionError("component saw both sides of the cycle")
        label[c] = s
    left, right = set(), set()
    for v, c in comp_of.items():
        if c not in label:
            raise AssertionError("component not adjacent to the cycle")
        (left if label[c] == "L" else right).add(v)
    return left, right
