"""Degree-choosable components: detection, search near a node, list-coloring, expansion checks.

The search in :func:`find_flexible_near` rests on one observation.  Take an
inclusion-minimal DCC U containing v and any cycle C through v inside U.
The induced closure G[C] is 2-connected, so it is a DCC unless it is an odd
hole or a clique.  In those two cases 2-connectivity of G[U] gives an ear
of U attached to C, and the closure of C plus the ear is again a DCC unless
it has grown into a bigger clique, which can only repeat until the clique
reaches Delta + 1 nodes.  So enumerating cycles through v, then ears, then
ears of cliques, misses nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .graph import (Graph, biconnected_components, connected_components, distances_from,
                    induced_subgraph, is_biconnected, weak_diameter)
from .primitives import Coloring, Violation, verify_proper

DCC = "dcc"
LOW_DEGREE = "low-degree"


@dataclass(frozen=True)
class FlexibleSubgraph:
    kind: str
    nodes: Tuple[int, ...]
    weak_diameter: int

    def to_json(self) -> dict:
        return {"kind": self.kind, "nodes": list(self.nodes), "weak_diameter": self.weak_diameter}


class DCCSearchIncomplete(RuntimeError):
    pass


class FlexibleColoringError(RuntimeError):
    def __init__(self, nodes: Sequence[int], msg: str):
        super().__init__(f"flexible subgraph {tuple(nodes)[:8]}...: {msg}")
        self.nodes = tuple(nodes)


def _is_clique(h: Graph) -> bool:
    n = h.n
    return all(h.degree(v) == n - 1 for v in h.nodes)


def _is_cycle(h: Graph) -> bool:
    return h.n >= 3 and all(h.degree(v) == 2 for v in h.nodes) and len(connected_components(h)) == 1


def classify(h: Graph) -> str:
    """'dcc', 'clique', 'odd-cycle' or 'not-2-connected' for an induced subgraph."""
    if not is_biconnected(h):
        return "not-2-connected"
    if _is_clique(h):
        return "clique"
    if _is_cycle(h) and h.n % 2 == 1:
        return "odd-cycle"
    return "dcc"


def is_lemma28_dcc(g: Graph, u: Iterable[int]) -> bool:
    u = list(u)
    if len(u) < 2:
        return False
    return classify(induced_subgraph(g, u)) == "dcc"


class _DistCache:
    """Truncated BFS maps keyed by source; shared across searches on one graph."""

    def __init__(self, g: Graph, radius: int):
        self.g = g
        self.radius = radius
        self.maps: Dict[int, Dict[int, int]] = {}

    def close(self, a: int, b: int) -> bool:
        m = self.maps.get(a)
        if m is None:
            m = self.maps[a] = distances_from(self.g, a, self.radius)
        return b in m


class _Search:
    def __init__(self, g: Graph, v: int, alpha: int, allowed: set, cache: _DistCache, budget: int):
        self.g = g
        self.v = v
        self.alpha = alpha
        self.allowed = allowed
        self.cache = cache
        self.budget = budget
        self.truncated = False
        self.saturated = False   # last enumeration reached the requested depth

    def _tick(self) -> bool:
        self.budget -= 1
        if self.budget <= 0:
            self.truncated = True
            return False
        return True

    def _fits(self, x: int, members: Iterable[int]) -> bool:
        return all(self.cache.close(x, y) for y in members)

    def cycles(self, length: int) -> List[frozenset]:
        """Node sets of cycles through v of exactly ``length`` nodes, pairwise within alpha."""
        g, v = self.g, self.v
        found = set()
        self.saturated = False
        path = [v]
        on_path = {v}
        stack = [iter(w for w in g.neighbors(v) if w in self.allowed)]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                on_path.discard(path.pop())
                continue
            if not self._tick():
                break
            if nxt in on_path or not self._fits(nxt, path):
                continue
            if len(path) == length - 1:
                self.saturated = True
                if path[1] < nxt and g.has_edge(nxt, v):
                    found.add(frozenset(path) | {nxt})
                continue
            path.append(nxt)
            on_path.add(nxt)
            stack.append(iter(w for w in g.neighbors(nxt) if w in self.allowed))
        return sorted(found, key=lambda c: (len(c), sorted(c)))

    def ears(self, base: frozenset, inner: int) -> List[frozenset]:
        """Base plus the ``inner`` interior nodes of an ear between two distinct base nodes."""
        g = self.g
        found = set()
        self.saturated = False
        for x in sorted(base):
            path: List[int] = []
            on_path = set()
            stack = [iter(g.neighbors(x))]
            while stack:
                nxt = next(stack[-1], None)
                if nxt is None:
                    stack.pop()
                    if path:
                        on_path.discard(path.pop())
                    continue
                if not self._tick():
                    return sorted(found, key=lambda c: (len(c), sorted(c)))
                if len(path) == inner:
                    self.saturated = True
                    if nxt in base and nxt != x:
                        found.add(base | on_path)
                    continue
                if nxt in base or nxt in on_path or nxt not in self.allowed:
                    continue
                if not self._fits(nxt, base) or not self._fits(nxt, path):
                    continue
                path.append(nxt)
                on_path.add(nxt)
                stack.append(iter(g.neighbors(nxt)))
        return sorted(found, key=lambda c: (len(c), sorted(c)))

    def _kind(self, nodes: frozenset) -> str:
        return classify(induced_subgraph(self.g, nodes))

    def _grow(self, base: frozenset) -> Optional[frozenset]:
        """Smallest DCC obtained from a stuck base by adding ears (cliques keep growing)."""
        room = len(self.allowed) - len(base)
        for inner in range(1, room + 1):
            best = None
            cands = self.ears(base, inner)
            deeper = self.saturated
            for cand in cands:
                kind = self._kind(cand)
                if kind == "dcc":
                    found = cand
                elif kind == "clique":
                    found = self._grow(cand)
                else:
                    found = None
                if found is not None and (best is None or (len(found), sorted(found)) < (len(best), sorted(best))):
                    best = found
            if best is not None or self.truncated or not deeper:
                return best
        return None

    def run(self) -> Optional[frozenset]:
        for length in range(3, len(self.allowed) + 1):
            stuck = []
            cycles = self.cycles(length)
            deeper = self.saturated
            for c in cycles:
                if self._kind(c) == "dcc":
                    return c
                stuck.append(c)
            best = None
            for c in stuck:
                found = self._grow(c)
                if found is not None and (best is None or (len(found), sorted(found)) < (len(best), sorted(best))):
                    best = found
            if best is not None or self.truncated or not deeper:
                return best
        return None


def find_flexible_near(g: Graph, v: int, alpha: int, delta: Optional[int] = None,
                       cache: Optional[_DistCache] = None, budget: int = 400_000) -> Optional[FlexibleSubgraph]:
    """Low-degree singleton, or a DCC through v of weak diameter <= alpha on degree-delta nodes.

    Returns None when nothing exists.  Raises DCCSearchIncomplete if the
    step budget runs out before the search space is exhausted.
    """
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    delta = g.max_degree() if delta is None else delta
    if g.degree(v) < delta:
        return FlexibleSubgraph(LOW_DEGREE, (v,), 0)
    if cache is None or cache.radius != alpha:
        cache = _DistCache(g, alpha)
    ball = distances_from(g, v, alpha)
    allowed = {u for u in ball if g.degree(u) == delta}
    blocks = [b for b in biconnected_components(g, allowed) if v in b and len(b) >= 3]
    if not blocks:
        return None
    region = set().union(*blocks)
    search = _Search(g, v, alpha, region, cache, budget)
    found = search.run()
    if found is None:
        if search.truncated:
            raise DCCSearchIncomplete(f"search budget exhausted around node {v}")
        return None
    nodes = tuple(sorted(found))
    return FlexibleSubgraph(DCC, nodes, int(weak_diameter(g, nodes)))


# -- coloring --------------------------------------------------------------

def _greedy_towards(h: Graph, lists: Mapping[int, Sequence[int]], root: int, col: Coloring) -> None:
    """Color uncolored nodes of h by decreasing distance from root (root last)."""
    todo = {u for u in h.nodes if u not in col}
    dist = distances_from(h, root, allowed=todo)
    order = sorted(todo, key=lambda u: (-dist.get(u, -1), u))
    for u in order:
        taken = {col[w] for w in h.neighbors(u) if w in col}
        free = [c for c in sorted(lists[u]) if c not in taken]
        if not free:
            raise FlexibleColoringError(h.nodes, f"greedy ran out of colors at {u}")
        col[u] = free[0]


def _constructive(h: Graph, lists: Mapping[int, Sequence[int]]) -> Coloring:
    nodes = h.nodes
    # some node with spare colors: finish there
    for u in nodes:
        if len(set(lists[u])) > h.degree(u):
            col: Coloring = {}
            _greedy_towards(h, lists, u, col)
            return col
    # two adjacent nodes with different lists
    for u in nodes:
        for w in h.neighbors(u):
            extra = sorted(set(lists[u]) - set(lists[w]))
            if extra:
                col = {u: extra[0]}
                rest = induced_subgraph(h, [x for x in nodes if x != u])
                sub_lists = {x: [c for c in lists[x] if not (c == extra[0] and h.has_edge(x, u))]
                             for x in rest.nodes}
                _greedy_towards(rest, sub_lists, w, col)
                return col
    # every list equal, every degree equal to the list size
    palette = sorted(set(lists[nodes[0]]))
    k = len(palette)
    if k == 2:
        dist = distances_from(h, nodes[0])
        return {u: palette[dist[u] % 2] for u in nodes}
    for b in nodes:
        for a, c in combinations(h.neighbors(b), 2):
            if h.has_edge(a, c):
                continue
            rest = [x for x in nodes if x not in (a, c)]
            if len(connected_components(induced_subgraph(h, rest))) != 1:
                continue
            col = {a: palette[0], c: palette[0]}
            _greedy_towards(h, lists, b, col)
            return col
    raise FlexibleColoringError(nodes, "no constructive case applies")


def _backtrack(h: Graph, lists: Mapping[int, Sequence[int]]) -> Optional[Coloring]:
    order = sorted(h.nodes, key=lambda u: (len(lists[u]), u))
    col: Coloring = {}

    def rec(i: int) -> bool:
        if i == len(order):
            return True
        u = order[i]
        taken = {col[w] for w in h.neighbors(u) if w in col}
        for c in sorted(set(lists[u])):
            if c not in taken:
                col[u] = c
                if rec(i + 1):
                    return True
                del col[u]
        return False

    return dict(col) if rec(0) else None


BACKTRACK_LIMIT = 2000


def color_flexible(g: Graph, s: FlexibleSubgraph, lists: Mapping[int, Iterable[int]]) -> Coloring:
    """Color the nodes of s from their lists (edges leave s are ignored)."""
    lists = {u: tuple(sorted(set(lists[u]))) for u in s.nodes}
    if s.kind == LOW_DEGREE:
        (u,) = s.nodes
        if not lists[u]:
            raise FlexibleColoringError(s.nodes, "empty list")
        return {u: lists[u][0]}
    h = induced_subgraph(g, s.nodes)
    for u in h.nodes:
        if len(lists[u]) < h.degree(u):
            raise FlexibleColoringError(s.nodes, f"node {u}: list {len(lists[u])} < degree {h.degree(u)}")
    try:
        col = _constructive(h, lists)
    except FlexibleColoringError:
        if h.n > BACKTRACK_LIMIT:
            raise
        col = _backtrack(h, lists)
        if col is None:
            raise FlexibleColoringError(s.nodes, "backtracking exhausted")
    bad = verify_proper(h, col)
    if bad is None:
        bad = next((Violation("list", f"node {u} got {c}", (u,)) for u, c in col.items() if c not in lists[u]), None)
    if bad is not None:
        raise FlexibleColoringError(s.nodes, f"internal check failed: {bad}")
    return col


# -- structural checks -----------------------------------------------------

def check_unique_bfs(g: Graph, v: int, r: int) -> Optional[Violation]:
    """None if every node within r of v has a single parent one step closer."""
    dist = distances_from(g, v, r)
    for u in sorted(dist):
        if dist[u] == 0:
            continue
        parents = [w for w in g.neighbors(u) if dist.get(w) == dist[u] - 1]
        if len(parents) > 1:
            return Violation("multi-parent", f"node {u} at depth {dist[u]} has parents {parents}",
                             (u, *parents))
    return None


@dataclass(frozen=True)
class ExpansionCheck:
    ok: bool
    size: int
    bound: int


def expansion_bound(delta: int, k: int) -> int:
    return (delta - 1) ** (k // 2)


def check_expansion(g: Graph, v: int, k: int, delta: Optional[int] = None) -> ExpansionCheck:
    delta = g.max_degree() if delta is None else delta
    dist = distances_from(g, v, k)
    size = sum(1 for d in dist.values() if d == k)
    bound = expansion_bound(delta, k)
    return ExpansionCheck(size >= bound, size, bound)
