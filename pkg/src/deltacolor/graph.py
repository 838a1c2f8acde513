"""Simple graphs, multihypergraphs, and the distance machinery built on them."""

from __future__ import annotations

import math
from bisect import bisect_left
from collections import deque
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

INF = math.inf


class GraphError(ValueError):
    pass


class Graph:
    """Immutable simple undirected graph over caller-supplied integer ids.

    Neighbor tuples are sorted, and so is ``nodes``; every downstream
    tie-break by id relies on that.
    """

    __slots__ = ("_adj", "_nodes")

    def __init__(self, nodes: Iterable[int] = (), edges: Iterable[Tuple[int, int]] = ()):
        adj: Dict[int, set] = {}
        for v in nodes:
            if v in adj:
                raise GraphError(f"duplicate node id {v}")
            adj[v] = set()
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if u not in adj or v not in adj:
                missing = u if u not in adj else v
                raise GraphError(f"edge ({u}, {v}) references unknown node {missing}")
            if v in adj[u]:
                raise GraphError(f"duplicate edge ({u}, {v})")
            adj[u].add(v)
            adj[v].add(u)
        self._nodes = tuple(sorted(adj))
        self._adj = {v: tuple(sorted(adj[v])) for v in self._nodes}

    @classmethod
    def _from_sorted(cls, adj: Dict[int, Tuple[int, ...]]) -> "Graph":
        g = cls.__new__(cls)
        g._nodes = tuple(sorted(adj))
        g._adj = adj
        return g

    @classmethod
    def from_adjacency(cls, adj: Mapping[int, Iterable[int]]) -> "Graph":
        edges = {(min(u, v), max(u, v)) for u, nbrs in adj.items() for v in nbrs}
        return cls(adj.keys(), sorted(edges))

    @property
    def nodes(self) -> Tuple[int, ...]:
        return self._nodes

    @property
    def n(self) -> int:
        return len(self._nodes)

    @property
    def m(self) -> int:
        return sum(len(a) for a in self._adj.values()) // 2

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def __iter__(self) -> Iterator[int]:
        return iter(self._nodes)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self._adj == other._adj

    def __hash__(self) -> int:
        return hash(tuple(self._adj.items()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self._adj.values()), default=0)

    def min_degree(self) -> int:
        return min((len(a) for a in self._adj.values()), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        a = self._adj.get(u)
        if not a:
            return False
        i = bisect_left(a, v)
        return i < len(a) and a[i] == v

    def edges(self) -> Iterator[Tuple[int, int]]:
        """Edges as (min, max) pairs, sorted."""
        for u in self._nodes:
            for v in self._adj[u]:
                if u < v:
                    yield (u, v)

    def adjacency(self) -> Dict[int, Tuple[int, ...]]:
        return dict(self._adj)


class Multihypergraph:
    """Nodes plus hyperedges keyed by distinct ids; equal member sets are allowed."""

    __slots__ = ("_nodes", "_edges", "_incident")

    def __init__(self, nodes: Iterable[int], hyperedges: Iterable[Tuple[int, Iterable[int]]] = ()):
        self._nodes = tuple(sorted(set(nodes)))
        known = set(self._nodes)
        self._edges: Dict[int, Tuple[int, ...]] = {}
        incident: Dict[int, List[int]] = {v: [] for v in self._nodes}
        for eid, members in hyperedges:
            if eid in self._edges:
                raise GraphError(f"duplicate hyperedge id {eid}")
            mem = tuple(sorted(set(members)))
            if not mem:
                raise GraphError(f"hyperedge {eid} is empty")
            for v in mem:
                if v not in known:
                    raise GraphError(f"hyperedge {eid} references unknown node {v}")
                incident[v].append(eid)
            self._edges[eid] = mem
        self._incident = {v: tuple(sorted(es)) for v, es in incident.items()}

    @property
    def nodes(self) -> Tuple[int, ...]:
        return self._nodes

    @property
    def edge_ids(self) -> Tuple[int, ...]:
        return tuple(sorted(self._edges))

    def members(self, eid: int) -> Tuple[int, ...]:
        return self._edges[eid]

    def incident(self, v: int) -> Tuple[int, ...]:
        return self._incident[v]

    def degree(self, v: int) -> int:
        return len(self._incident[v])

    def rank(self, eid: int) -> int:
        return len(self._edges[eid])

    def max_rank(self) -> int:
        return max((len(m) for m in self._edges.values()), default=0)

    def min_degree(self) -> int:
        return min((len(es) for es in self._incident.values()), default=0)

    def hyperedges(self) -> Iterator[Tuple[int, Tuple[int, ...]]]:
        for eid in sorted(self._edges):
            yield eid, self._edges[eid]

    def __len__(self) -> int:
        return len(self._nodes)

    def __repr__(self) -> str:
        return f"Multihypergraph(n={len(self._nodes)}, m={len(self._edges)})"

    def comembership_graph(self) -> Graph:
        """Graph joining nodes that share at least one hyperedge."""
        adj: Dict[int, set] = {v: set() for v in self._nodes}
        for mem in self._edges.values():
            for u in mem:
                adj[u].update(mem)
        return Graph._from_sorted({v: tuple(sorted(s - {v})) for v, s in adj.items()})


def _check_nodes(g: Graph, u: Iterable[int]) -> List[int]:
    out = []
    for v in u:
        if v not in g:
            raise GraphError(f"unknown node id {v}")
        out.append(v)
    return out


def induced_subgraph(g: Graph, u: Iterable[int]) -> Graph:
    keep = set(_check_nodes(g, u))
    return Graph._from_sorted(
        {v: tuple(w for w in g.neighbors(v) if w in keep) for v in keep}
    )


def bfs_layers(
    g: Graph,
    sources: Iterable[int],
    max_depth: Optional[int] = None,
    allowed: Optional[set] = None,
) -> Dict[int, float]:
    """Hop distance from the source set to every node (INF when unreachable).

    ``allowed`` restricts the traversal to an induced subgraph without
    building it; nodes outside it are reported as INF.
    """
    srcs = _check_nodes(g, sources)
    if not srcs:
        raise GraphError("bfs_layers needs at least one source")
    dist: Dict[int, float] = {}
    frontier = deque()
    for s in srcs:
        if (allowed is None or s in allowed) and s not in dist:
            dist[s] = 0
            frontier.append(s)
    while frontier:
        v = frontier.popleft()
        d = dist[v]
        if max_depth is not None and d >= max_depth:
            continue
        for w in g.neighbors(v):
            if w not in dist and (allowed is None or w in allowed):
                dist[w] = d + 1
                frontier.append(w)
    if max_depth is not None:
        return dist
    return {v: dist.get(v, INF) for v in g.nodes}


def distances_from(g: Graph, v: int, max_depth: Optional[int] = None,
                   allowed: Optional[set] = None) -> Dict[int, int]:
    """Finite distances only, optionally truncated; cheaper than bfs_layers for local balls."""
    dist = {v: 0}
    frontier = [v]
    d = 0
    while frontier and (max_depth is None or d < max_depth):
        d += 1
        nxt = []
        for x in frontier:
            for w in g.neighbors(x):
                if w not in dist and (allowed is None or w in allowed):
                    dist[w] = d
                    nxt.append(w)
        frontier = nxt
    return dist


def ball(g: Graph, v: int, r: int) -> Tuple[int, ...]:
    _check_nodes(g, [v])
    return tuple(sorted(distances_from(g, v, r)))


def sphere(g: Graph, v: int, r: int) -> Tuple[int, ...]:
    _check_nodes(g, [v])
    return tuple(sorted(u for u, d in distances_from(g, v, r).items() if d == r))


def power_graph(g: Graph, k: int) -> Graph:
    if k < 1:
        raise GraphError("power graph order must be >= 1")
    if k == 1:
        return g
    adj = {}
    for v in g.nodes:
        adj[v] = tuple(sorted(u for u in distances_from(g, v, k) if u != v))
    return Graph._from_sorted(adj)


def connected_components(g: Graph, allowed: Optional[set] = None) -> List[Tuple[int, ...]]:
    """Components sorted by their smallest id; each component is a sorted tuple."""
    seen = set()
    comps = []
    for s in g.nodes:
        if s in seen or (allowed is not None and s not in allowed):
            continue
        comp = distances_from(g, s, allowed=allowed)
        seen.update(comp)
        comps.append(tuple(sorted(comp)))
    return comps


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or len(distances_from(g, g.nodes[0])) == g.n


def articulation_points(g: Graph) -> List[int]:
    """Cut vertices, iterative Hopcroft-Tarjan."""
    disc: Dict[int, int] = {}
    low: Dict[int, int] = {}
    cut = set()
    t = 0
    for root in g.nodes:
        if root in disc:
            continue
        disc[root] = low[root] = t
        t += 1
        root_children = 0
        stack = [(root, -1, iter(g.neighbors(root)))]
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w == parent:
                    continue
                if w in disc:
                    low[v] = min(low[v], disc[w])
                else:
                    disc[w] = low[w] = t
                    t += 1
                    if v == root:
                        root_children += 1
                    stack.append((w, v, iter(g.neighbors(w))))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[v])
                    if p != root and low[v] >= disc[p]:
                        cut.add(p)
        if root_children > 1:
            cut.add(root)
    return sorted(cut)


def is_biconnected(g: Graph) -> bool:
    """Connected, at least two nodes, and no cut vertex (K2 counts as biconnected)."""
    if g.n < 2 or not is_connected(g):
        return False
    return not articulation_points(g)


def weak_diameter(g: Graph, u: Iterable[int]) -> float:
    """Largest distance in ``g`` between two members of ``u``."""
    members = _check_nodes(g, u)
    if len(members) <= 1:
        return 0
    target = set(members)
    best = 0
    for s in members:
        # BFS that stops once every member has been reached
        seen = {s: 0}
        frontier = [s]
        left = len(target) - 1
        d = 0
        while frontier and left:
            d += 1
            nxt = []
            for x in frontier:
                for w in g.neighbors(x):
                    if w not in seen:
                        seen[w] = d
                        nxt.append(w)
                        if w in target:
                            left -= 1
            frontier = nxt
        if left:
            return INF
        best = max(best, max(seen[t] for t in target))
    return best


def eccentricity_within(g: Graph, v: int, allowed: set) -> float:
    dist = distances_from(g, v, allowed=allowed)
    if len(dist) < len(allowed):
        return INF
    return max(dist.values())


def strong_diameter(g: Graph, u: Iterable[int]) -> float:
    """Diameter of G[u] (INF if disconnected)."""
    members = set(_check_nodes(g, u))
    best = 0
    for s in members:
        e = eccentricity_within(g, s, members)
        if e == INF:
            return INF
        best = max(best, e)
    return best


def diameter(g: Graph) -> float:
    return strong_diameter(g, g.nodes)


def girth(g: Graph) -> float:
    """Length of a shortest cycle, INF for forests (BFS from every node)."""
    best = INF
    for s in g.nodes:
        dist = {s: 0}
        parent = {s: None}
        frontier = deque([s])
        while frontier:
            v = frontier.popleft()
            if 2 * dist[v] + 1 >= best:
                break
            for w in g.neighbors(v):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    parent[w] = v
                    frontier.append(w)
                elif parent[v] != w:
                    best = min(best, dist[v] + dist[w] + 1)
    return best


def neighborhood(g: Graph, u: Iterable[int]) -> set:
    """N(U): nodes adjacent to U but outside it."""
    inside = set(u)
    out = set()
    for v in inside:
        out.update(g.neighbors(v))
    return out - inside


def relabel(g: Graph, mapping: Mapping[int, int]) -> Graph:
    return Graph((mapping[v] for v in g.nodes), ((mapping[u], mapping[v]) for u, v in g.edges()))


def read_edgelist(text: str) -> Graph:
    """Parse the "n m" header format; '#' lines are comments."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise GraphError("empty edge list")
    try:
        n, m = (int(x) for x in lines[0].split())
    except ValueError as exc:
        raise GraphError(f"bad header line: {lines[0]!r}") from exc
    if len(lines) - 1 != m:
        raise GraphError(f"header promises {m} edges, found {len(lines) - 1}")
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphError(f"bad edge line: {ln!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return Graph(range(n), edges)


def write_edgelist(g: Graph, comment: Optional[str] = None) -> str:
    """Serialize with dense 0-based ids; graphs with other ids are compacted in id order."""
    index = {v: i for i, v in enumerate(g.nodes)}
    out = []
    if comment:
        out.extend(f"# {line}" for line in comment.splitlines())
    edges = sorted((index[u], index[v]) for u, v in g.edges())
    out.append(f"{g.n} {len(edges)}")
    out.extend(f"{u} {v}" for u, v in edges)
    return "\n".join(out) + "\n"


def complete_graph(nodes: Sequence[int]) -> Graph:
    nodes = list(nodes)
    return Graph(nodes, [(nodes[i], nodes[j]) for i in range(len(nodes)) for j in range(i + 1, len(nodes))])


def biconnected_components(g: Graph, allowed: Optional[set] = None) -> List[Tuple[int, ...]]:
    """Blocks with at least one edge (bridges count as 2-node blocks), iterative."""
    disc: Dict[int, int] = {}
    low: Dict[int, int] = {}
    blocks: List[Tuple[int, ...]] = []
    t = 0
    roots = g.nodes if allowed is None else sorted(v for v in allowed if v in g)
    for root in roots:
        if root in disc:
            continue
        disc[root] = low[root] = t
        t += 1
        edge_stack: List[Tuple[int, int]] = []
        stack = [(root, -1, iter(g.neighbors(root)))]
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w == parent or (allowed is not None and w not in allowed):
                    continue
                if w in disc:
                    if disc[w] < disc[v]:
                        edge_stack.append((v, w))
                        low[v] = min(low[v], disc[w])
                else:
                    disc[w] = low[w] = t
                    t += 1
                    edge_stack.append((v, w))
                    stack.append((w, v, iter(g.neighbors(w))))
                    advanced = True
                    break
            if advanced:
                continue
            stack.pop()
            if not stack:
                continue
            p = stack[-1][0]
            low[p] = min(low[p], low[v])
            if low[v] >= disc[p]:
                comp = set()
                while True:
                    a, b = edge_stack.pop()
                    comp.add(a)
                    comp.add(b)
                    if (a, b) == (p, v):
                        break
                blocks.append(tuple(sorted(comp)))
    return blocks
