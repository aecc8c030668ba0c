"""Finite unit-edge graphs with a fixed vertex order.

Everything downstream leans on two properties of this module: distances are
exact breadth-first distances, and every tie (geodesic choice, projection
output order) is broken by vertex index, so identical inputs give identical
outputs across runs.
"""

from __future__ import annotations

import itertools
import random
import warnings
from collections import deque


class MetricGraph:
    """Undirected graph with unit edge lengths.

    ``adjacency`` maps a vertex to an iterable of neighbors.  ``order`` fixes
    the vertex enumeration; it defaults to sorted(adjacency).
    """

    def __init__(self, adjacency, order=None):
        vertices = tuple(order) if order is not None else tuple(sorted(adjacency))
        if len(set(vertices)) != len(vertices):
            raise ValueError("duplicate vertex in order")
        index = {v: i for i, v in enumerate(vertices)}
        nbrs: list[tuple[int, ...]] = []
        for v in vertices:
            row = set()
            for u in adjacency.get(v, ()):
                if u == v:
                    continue
                if u not in index:
                    raise ValueError("vertex not in graph")
                row.add(index[u])
            nbrs.append(tuple(sorted(row)))
        self.vertices: tuple = vertices
        self.index: dict = index
        self._nbrs: tuple[tuple[int, ...], ...] = tuple(nbrs)
        # symmetrize defensively; callers pass symmetric adjacency already
        sym = [set(row) for row in self._nbrs]
        for i, row in enumerate(self._nbrs):
            for j in row:
                sym[j].add(i)
        self._nbrs = tuple(tuple(sorted(s)) for s in sym)
        self._bfs_cache: dict[int, list[int]] = {}

    def __contains__(self, v) -> bool:
        return v in self.index

    def __len__(self) -> int:
        return len(self.vertices)

    def neighbors(self, v):
        return tuple(self.vertices[j] for j in self._nbrs[self._idx(v)])

    def degree(self, v) -> int:
        return len(self._nbrs[self._idx(v)])

    def edges(self):
        """Sorted list of index pairs (i, j) with i < j."""
        out = []
        for i, row in enumerate(self._nbrs):
            for j in row:
                if i < j:
                    out.append((i, j))
        return out

    def _idx(self, v) -> int:
        try:
            return self.index[v]
        except KeyError:
            raise ValueError("vertex not in graph") from None

    def _bfs(self, src: int) -> list[int]:
        hit = self._bfs_cache.get(src)
        if hit is not None:
            return hit
        dist = [-1] * len(self.vertices)
        dist[src] = 0
        q = deque([src])
        while q:
            i = q.popleft()
            d = dist[i] + 1
            for j in self._nbrs[i]:
                if dist[j] < 0:
                    dist[j] = d
                    q.append(j)
        if len(self._bfs_cache) < 4096:
            self._bfs_cache[src] = dist
        return dist

    def distances_from(self, v) -> list[int]:
        """BFS distances in vertex order; -1 marks unreachable vertices."""
        return list(self._bfs(self._idx(v)))

    def distance(self, u, v) -> int:
        d = self._bfs(self._idx(u))[self._idx(v)]
        if d < 0:
            raise ValueError("unreachable")
        return d

    def geodesic(self, u, v) -> list:
        """One geodesic from u to v, ties broken toward the smallest index."""
        su, sv = self._idx(u), self._idx(v)
        dist = self._bfs(sv)
        if dist[su] < 0:
            raise ValueError("unreachable")
        path = [su]
        cur = su
        while cur != sv:
            cur = min(j for j in self._nbrs[cur] if 0 <= dist[j] == dist[cur] - 1)
            path.append(cur)
        return [self.vertices[i] for i in path]

    def eccentricity(self, v) -> int:
        return max(self._bfs(self._idx(v)))

    def diameter(self) -> int:
        return max(max(self._bfs(i)) for i in range(len(self.vertices)))


def nearest_point_projection(graph: MetricGraph, target, source) -> tuple:
    """All vertices of ``target`` at minimal distance from ``source``.

    ``source`` may be a single vertex or an iterable of vertices; in the set
    case the projections of the individual points are unioned.  The result is
    ordered by vertex index.
    """
    if isinstance(source, str):
        sources = [source]
    else:
        try:
            single = source in graph.index
        except TypeError:
            single = False
        sources = [source] if single else list(source)
    targets = [graph._idx(t) for t in target]
    if not targets or not sources:
        raise ValueError("empty projection input")
    out: set[int] = set()
    for s in sources:
        dist = graph._bfs(graph._idx(s))
        best = min(dist[t] for t in targets if dist[t] >= 0)
        out.update(t for t in targets if dist[t] == best)
    return tuple(graph.vertices[i] for i in sorted(out))


def set_diameter(graph: MetricGraph, vertices) -> int:
    vs = [graph._idx(v) for v in vertices]
    if not vs:
        raise ValueError("empty projection input")
    best = 0
    for i in vs:
        row = graph._bfs(i)
        best = max(best, max(row[j] for j in vs))
    return best


def estimate_hyperbolicity(graph: MetricGraph, sample=None, seed: int = 0,
                           samples: int = 2000, exhaustive_limit: int = 40) -> float:
    """Four-point hyperbolicity estimate.

    For a quadruple, form the three pairings of opposite distances and take
    half the gap between the two largest sums.  The maximum over quadruples
    is the four-point constant; it is 0 on trees.  ``sample`` may list the
    4-tuples of vertices to check; otherwise all quadruples are checked on
    at most ``exhaustive_limit`` vertices and a seeded sample is used above
    that, making the value a lower bound.
    """
    n = len(graph.vertices)
    if sample is not None:
        quads = [tuple(graph._idx(v) for v in quad) for quad in sample]
    elif n < 4:
        return 0.0
    elif n <= exhaustive_limit:
        quads = itertools.combinations(range(n), 4)
    else:
        rng = random.Random(seed)
        if n > 1200:
            return _sampled_fourpoint_fast(graph, rng, samples)
        pool = range(n)
        quads = (tuple(rng.sample(pool, 4)) for _ in range(samples))
    best = 0.0
    seen_any = False
    for a, b, c, d in quads:
        da, db, dc = graph._bfs(a), graph._bfs(b), graph._bfs(c)
        if min(da[b], da[c], da[d], db[c], db[d], dc[d]) < 0:
            continue
        seen_any = True
        sums = sorted((da[b] + dc[d], da[c] + db[d], da[d] + db[c]))
        best = max(best, (sums[2] - sums[1]) / 2)
    if not seen_any:
        warnings.warn("no connected quadruple sampled; hyperbolicity estimate is vacuous")
    return best


def _sampled_fourpoint_fast(graph: MetricGraph, rng, samples: int) -> float:
    """Seeded four-point sampling backed by batched sparse BFS.

    Quadruples are drawn from a random vertex pool sized so that the pool
    distance matrix stays small; distances come from one batched run over
    the sparse adjacency, keeping large-ball sampling under a second where
    the per-vertex Python BFS would take minutes.
    """
    import numpy as np
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import shortest_path

    n = len(graph.vertices)
    pool = sorted(rng.sample(range(n), min(n, 1200)))
    pos = {v: k for k, v in enumerate(pool)}
    rows_idx, cols_idx = [], []
    for i, j in graph.edges():
        rows_idx += [i, j]
        cols_idx += [j, i]
    adj = csr_matrix((np.ones(len(rows_idx), dtype=np.int8), (rows_idx, cols_idx)),
                     shape=(n, n))
    dm = shortest_path(adj, method="D", unweighted=True, indices=pool)[:, pool]
    quads = np.array([rng.sample(pool, 4) for _ in range(samples)], dtype=np.int64)
    loc = np.vectorize(pos.__getitem__)(quads)
    a, b, c, d = loc[:, 0], loc[:, 1], loc[:, 2], loc[:, 3]
    s1 = dm[a, b] + dm[c, d]
    s2 = dm[a, c] + dm[b, d]
    s3 = dm[a, d] + dm[b, c]
    sums = np.sort(np.stack([s1, s2, s3]), axis=0)
    finite = np.isfinite(sums).all(axis=0)
    if not finite.any():
        warnings.warn("no connected quadruple sampled; hyperbolicity estimate is vacuous")
        return 0.0
    return float(((sums[2] - sums[1]) / 2)[finite].max())


def bfs_rows(graph: MetricGraph, sources):
    """Distance rows from the given vertex indices, batched over scipy.

    Returns an int32 array of shape (len(sources), n) with -1 where a
    vertex is unreachable.  One sparse run replaces len(sources) Python
    traversals, which matters when the same small source set is queried
    against many targets.
    """
    import numpy as np
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import shortest_path

    n = len(graph.vertices)
    rows_idx, cols_idx = [], []
    for i, j in graph.edges():
        rows_idx += [i, j]
        cols_idx += [j, i]
    adj = csr_matrix((np.ones(len(rows_idx), dtype=np.int8), (rows_idx, cols_idx)),
                     shape=(n, n))
    dm = shortest_path(adj, method="D", unweighted=True, indices=list(sources))
    out = np.full(dm.shape, -1, dtype=np.int32)
    reach = np.isfinite(dm)
    out[reach] = dm[reach].astype(np.int32)
    return out


def bottleneck_check(graph: MetricGraph, pairs=None, seed: int = 0,
                     samples: int = 200) -> tuple[bool, int]:
    """Midpoint-separation test for being quasi-isometric to a tree.

    For each pair, pick the geodesic midpoint (the earlier central vertex on
    odd-length geodesics) and find the smallest Delta such that every path
    between the pair meets the closed Delta-ball around that midpoint.
    Returns (passed, Delta) where Delta is the max over the checked pairs
    and passed means every pair got a finite Delta.  Trees give Delta = 0.
    """
    n = len(graph.vertices)
    if n < 2:
        return True, 0
    if pairs is not None:
        idx_pairs = [(graph._idx(u), graph._idx(v)) for u, v in pairs]
        for a, b in idx_pairs:
            if graph._bfs(a)[b] < 0:
                raise ValueError("unreachable")
    else:
        idx_pairs = list(itertools.combinations(range(n), 2))
        if len(idx_pairs) > samples:
            rng = random.Random(seed)
            idx_pairs = rng.sample(idx_pairs, samples)
        idx_pairs = [(a, b) for a, b in idx_pairs if graph._bfs(a)[b] >= 0]
    worst = 0
    checked = False
    passed = True
    for a, b in idx_pairs:
        if a == b:
            continue
        checked = True
        geo = [graph.index[v] for v in graph.geodesic(graph.vertices[a], graph.vertices[b])]
        mid = geo[(len(geo) - 1) // 2]
        dist_m = graph._bfs(mid)
        for r in range(0, max(dist_m) + 1):
            if not _connected_avoiding(graph, a, b, dist_m, r):
                worst = max(worst, r)
                break
        else:
            passed = False
    if not checked:
        warnings.warn("no connected pair sampled; bottleneck estimate is vacuous")
    return passed, worst


def graph_to_text(graph: MetricGraph, label=str) -> str:
    """Adjacency-list dump, one ``id: n1,n2,...`` line per vertex."""
    lines = []
    for i, v in enumerate(graph.vertices):
        nbrs = ",".join(label(graph.vertices[j]) for j in graph._nbrs[i])
        lines.append(f"{label(v)}: {nbrs}")
    return "\n".join(lines) + "\n"


def _connected_avoiding(graph: MetricGraph, a: int, b: int, dist_m: list[int], r: int) -> bool:
    """Is there an a-b path avoiding the closed r-ball given by dist_m?"""
    if dist_m[a] <= r or dist_m[b] <= r:
        return False
    seen = {a}
    q = deque([a])
    while q:
        i = q.popleft()
        if i == b:
            return True
        for j in graph._nbrs[i]:
            if j not in seen and dist_m[j] > r:
                seen.add(j)
                q.append(j)
    return False
