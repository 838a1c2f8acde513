"""Cluster partition (dcc / flex / link), gatherers, and the cluster hypergraph."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .dcc import (DCC, LOW_DEGREE, FlexibleSubgraph, _DistCache, check_unique_bfs, classify,
                  find_flexible_near)
from .graph import (INF, Graph, Multihypergraph, distances_from, induced_subgraph, neighborhood,
                    power_graph, strong_diameter)
from .primitives import MISResult, Violation, greedy_mis_power, mis_luby

DCC_KIND, FLEX_KIND, LINK_KIND = "dcc", "flex", "link"


class ParamsError(ValueError):
    pass


class ClusterError(RuntimeError):
    pass


@dataclass(frozen=True)
class Params:
    alpha_dcc: int
    alpha_flex: int
    beta_flex: int
    alpha_link: int
    beta_link: int
    mode: str = "det"
    scaled: bool = False

    def __post_init__(self):
        if self.mode not in ("det", "rand"):
            raise ParamsError(f"mode must be det or rand, got {self.mode!r}")
        problems = self.violations(floors=not self.scaled)
        if problems:
            hint = "" if self.scaled else " (pass scaled=True for sub-floor constants)"
            raise ParamsError("; ".join(problems) + hint)

    def violations(self, floors: bool = True) -> List[str]:
        a_d, a_f, b_f, a_l, b_l = self.as_tuple()
        out = []
        if min(a_d, a_f, b_f, a_l, b_l) < 1:
            out.append("all constants must be positive")
        if a_f < 2:
            out.append("alpha_flex >= 2")
        if b_f < 2 * a_f + 2:
            out.append("beta_flex >= 2*alpha_flex + 2")
        if floors:
            checks = [
                (a_f >= 12, "alpha_flex >= 12"),
                (a_d >= a_f, "alpha_dcc >= alpha_flex"),
                (a_l >= 16, "alpha_link >= 16"),
                (b_f >= 2 * (a_f + a_l + 1), "beta_flex >= 2(alpha_flex + alpha_link + 1)"),
                (2 * b_l >= 4 * a_l + 3 * b_f, "beta_link >= 2 alpha_link + 1.5 beta_flex"),
                (a_d >= 2 * (a_l + b_f), "alpha_dcc >= 2(alpha_link + beta_flex)"),
            ]
            out.extend(msg for ok, msg in checks if not ok)
        return out

    def as_tuple(self) -> Tuple[int, int, int, int, int]:
        return (self.alpha_dcc, self.alpha_flex, self.beta_flex, self.alpha_link, self.beta_link)

    @property
    def paper_constants(self) -> bool:
        return not self.violations(floors=True)

    def to_json(self) -> dict:
        return {"alpha_dcc": self.alpha_dcc, "alpha_flex": self.alpha_flex, "beta_flex": self.beta_flex,
                "alpha_link": self.alpha_link, "beta_link": self.beta_link, "mode": self.mode,
                "scaled": self.scaled}


DETERMINISTIC = Params(148, 12, 58, 16, 119)
RANDOMIZED = Params(348, 32, 138, 36, 279, mode="rand")
SCALED_DEFAULT = Params(4, 2, 6, 2, 13, scaled=True)


@dataclass
class Cluster:
    cid: int
    kind: str
    nodes: Tuple[int, ...]
    center: Optional[int] = None
    flexible: Optional[FlexibleSubgraph] = None


@dataclass
class ClusterPartition:
    g: Graph
    delta: int
    clusters: Dict[int, Cluster] = field(default_factory=dict)
    cluster_of: Dict[int, int] = field(default_factory=dict)
    rounds: Dict[str, int] = field(default_factory=dict)

    def add(self, c: Cluster) -> None:
        for v in c.nodes:
            if v in self.cluster_of:
                raise ClusterError(f"node {v} assigned twice")
            self.cluster_of[v] = c.cid
        self.clusters[c.cid] = c

    def kind_of(self, v: int) -> Optional[str]:
        cid = self.cluster_of.get(v)
        return None if cid is None else self.clusters[cid].kind

    def of_kind(self, kind: str) -> List[Cluster]:
        return [c for _, c in sorted(self.clusters.items()) if c.kind == kind]

    def nodes_of_kind(self, kind: str) -> set:
        return {v for c in self.of_kind(kind) for v in c.nodes}

    def next_cid(self) -> int:
        return max(self.clusters, default=-1) + 1

    def touches(self, c: Cluster, kind: str) -> bool:
        return any(self.kind_of(w) == kind for w in neighborhood(self.g, c.nodes))

    def gammas(self) -> Dict[str, float]:
        out = {}
        for kind in (DCC_KIND, FLEX_KIND, LINK_KIND):
            ds = [strong_diameter(self.g, c.nodes) for c in self.of_kind(kind)]
            out[kind] = max(ds, default=0)
        return out

    def counts(self) -> Dict[str, int]:
        return {k: len(self.of_kind(k)) for k in (DCC_KIND, FLEX_KIND, LINK_KIND)}


def _run_mis(g: Graph, k: int, allowed: Iterable[int], mode: str, seed: int) -> MISResult:
    """MIS on G[allowed]^k.  Deterministic mode uses the implicit greedy."""
    allowed = sorted(allowed)
    if mode == "det":
        return greedy_mis_power(g, k, allowed)
    sub = power_graph(induced_subgraph(g, allowed), k)
    return mis_luby(sub, seed)


def _mis_on(vg: Graph, mode: str, seed: int) -> MISResult:
    if mode == "det":
        return greedy_mis_power(vg, 1)
    return mis_luby(vg, seed)


# -- dcc clusters ----------------------------------------------------------

def select_flexible(g: Graph, alpha: int, delta: int) -> List[FlexibleSubgraph]:
    """Every node's pick of a low-degree singleton or nearby DCC, deduplicated and ordered."""
    picks: Dict[frozenset, FlexibleSubgraph] = {}
    covered: Dict[int, FlexibleSubgraph] = {}
    cache = _DistCache(g, alpha)
    for v in g.nodes:
        if g.degree(v) < delta:
            f = FlexibleSubgraph(LOW_DEGREE, (v,), 0)
        elif v in covered:
            # v belongs to a DCC someone already picked; choosing it is as good as any
            continue
        else:
            f = find_flexible_near(g, v, alpha, delta, cache=cache)
            if f is None:
                continue
            for u in f.nodes:
                covered.setdefault(u, f)
        picks.setdefault(frozenset(f.nodes), f)
    return sorted(picks.values(), key=lambda f: (len(f.nodes), f.nodes))


def build_dcc_clusters(g: Graph, p: Params, seed: int = 0, delta: Optional[int] = None) -> ClusterPartition:
    delta = g.max_degree() if delta is None else delta
    cp = ClusterPartition(g, delta)
    cands = select_flexible(g, p.alpha_dcc, delta)
    holder: Dict[int, List[int]] = {}
    for i, f in enumerate(cands):
        for v in f.nodes:
            holder.setdefault(v, []).append(i)
    edges = set()
    for i, f in enumerate(cands):
        zone = set(f.nodes) | neighborhood(g, f.nodes)
        for v in zone:
            for j in holder.get(v, ()):
                if j != i:
                    edges.add((min(i, j), max(i, j)))
    g_dcc = Graph(range(len(cands)), sorted(edges))
    res = _mis_on(g_dcc, p.mode, seed)
    chosen = sorted(res.nodes)
    cp.rounds["dcc_select"] = p.alpha_dcc
    cp.rounds["dcc_mis"] = res.rounds * (2 * p.alpha_dcc + 1)

    owner: Dict[int, int] = {}
    for cid, i in enumerate(chosen):
        for v in cands[i].nodes:
            owner[v] = cid
    frontier = sorted(owner)
    for _ in range(p.alpha_dcc + 1):
        claims: Dict[int, int] = {}
        for v in frontier:
            for w in g.neighbors(v):
                if w not in owner:
                    c = owner[v]
                    if w not in claims or c < claims[w]:
                        claims[w] = c
        owner.update(claims)
        frontier = sorted(claims)
        if not frontier:
            break
    cp.rounds["dcc_grow"] = p.alpha_dcc + 1
    members: Dict[int, List[int]] = {}
    for v, cid in owner.items():
        members.setdefault(cid, []).append(v)
    for cid, i in enumerate(chosen):
        cp.add(Cluster(cid, DCC_KIND, tuple(sorted(members[cid])), flexible=cands[i]))
    return cp


# -- flex clusters ---------------------------------------------------------

def build_flex_clusters(cp: ClusterPartition, p: Params, seed: int = 0) -> ClusterPartition:
    g = cp.g
    rest = [v for v in g.nodes if v not in cp.cluster_of]
    if not rest:
        cp.rounds["flex_mis"] = 0
        return cp
    allowed = set(rest)
    res = _run_mis(g, p.beta_flex, rest, p.mode, seed)
    cp.rounds["flex_mis"] = res.rounds * p.beta_flex
    cp.rounds["flex_ball"] = p.alpha_flex
    base = cp.next_cid()
    for k, z in enumerate(sorted(res.nodes)):
        ball = distances_from(g, z, p.alpha_flex, allowed=allowed)
        cp.add(Cluster(base + k, FLEX_KIND, tuple(sorted(ball)), center=z))
    return cp


# -- link clusters ---------------------------------------------------------

def build_link_clusters(cp: ClusterPartition, p: Params, seed: int = 0) -> ClusterPartition:
    g = cp.g
    rest = [v for v in g.nodes if v not in cp.cluster_of]
    if not rest:
        cp.rounds["link_mis"] = 0
        return cp
    allowed = set(rest)
    res = _run_mis(g, p.beta_link, rest, p.mode, seed + 1)
    cp.rounds["link_mis"] = res.rounds * p.beta_link
    centers = sorted(res.nodes)
    owner = {z: z for z in centers}
    frontier = centers
    for _ in range(p.beta_link):
        claims: Dict[int, int] = {}
        for v in frontier:
            for w in g.neighbors(v):
                if w in allowed and w not in owner:
                    if w not in claims or owner[v] < claims[w]:
                        claims[w] = owner[v]
        owner.update(claims)
        frontier = sorted(claims)
        if not frontier:
            break
    cp.rounds["link_grow"] = p.beta_link
    missing = sorted(allowed - set(owner))
    if missing:
        raise ClusterError(f"link phase left {len(missing)} nodes uncovered, e.g. {missing[:5]}")
    base = cp.next_cid()
    members: Dict[int, List[int]] = {}
    for v, z in owner.items():
        members.setdefault(z, []).append(v)
    for k, z in enumerate(centers):
        cp.add(Cluster(base + k, LINK_KIND, tuple(sorted(members[z])), center=z))
    return cp


def build_partition(g: Graph, p: Params, seed: int = 0) -> ClusterPartition:
    cp = build_dcc_clusters(g, p, seed)
    build_flex_clusters(cp, p, seed)
    build_link_clusters(cp, p, seed)
    return cp


# -- gatherers -------------------------------------------------------------

@dataclass
class Gatherer:
    v: int
    parent: int
    depth: int
    T: Tuple[int, ...]
    D: Tuple[int, ...]
    conflicts: Tuple[int, ...]
    pair: Tuple[int, int]

    def to_json(self) -> dict:
        return {"v": self.v, "parent": self.parent, "depth": self.depth, "T": list(self.T),
                "D": list(self.D), "conflicts": list(self.conflicts), "pair": list(self.pair)}


def gatherer_depth(p: Params) -> int:
    return max(p.alpha_flex - 2, 1)


def _nonadjacent_pair(g: Graph, nodes: Sequence[int]) -> Optional[Tuple[int, int]]:
    for a, b in combinations(sorted(nodes), 2):
        if not g.has_edge(a, b):
            return (a, b)
    return None


def find_gatherers(cp: ClusterPartition, p: Params, c: Cluster) -> List[Gatherer]:
    g = cp.g
    if cp.touches(c, DCC_KIND):
        raise ClusterError(f"flex cluster {c.cid} touches V_dcc and needs no gatherers")
    members = set(c.nodes)
    z = c.center
    sub = induced_subgraph(g, members)
    witness = check_unique_bfs(sub, z, p.alpha_flex)
    if witness is not None:
        raise ClusterError(f"flex cluster {c.cid}: BFS from center {z} is not unique ({witness})")
    depth = distances_from(sub, z)
    parent = {}
    for u in members:
        if u != z:
            parent[u] = next(w for w in sub.neighbors(u) if depth.get(w) == depth[u] - 1)

    def T_of(u: int) -> Tuple[int, ...]:
        return tuple(w for w in sub.neighbors(u) if w != parent[u])

    t = gatherer_depth(p)
    cands = []
    for u in sorted(x for x in members if depth.get(x) == t):
        if _nonadjacent_pair(g, T_of(u)) is not None:
            cands.append(u)
            continue
        kids = sorted(w for w in sub.neighbors(u) if parent.get(w) == u)
        for k in kids:
            if _nonadjacent_pair(g, T_of(k)) is not None:
                cands.append(k)
                break

    link_of = {v: cp.cluster_of[v] for v in g.nodes if cp.kind_of(v) == LINK_KIND}
    chosen: List[Gatherer] = []
    used: set = set()
    for u in sorted(set(cands)):
        T = T_of(u)
        cut = members - set(T)
        reach = distances_from(g, z, allowed=cut)
        D = tuple(sorted(x for x in cut if x not in reach))
        zone = set(T) | set(D)
        if zone & used:
            continue
        conflicts = tuple(sorted({link_of[w] for w in neighborhood(g, zone) if w in link_of}))
        chosen.append(Gatherer(u, parent[u], depth[u], T, D, conflicts, _nonadjacent_pair(g, T)))
        used |= zone
    if not chosen:
        raise ClusterError(f"flex cluster {c.cid} (center {z}) has no gatherer candidates")
    return chosen


def find_all_gatherers(cp: ClusterPartition, p: Params) -> Dict[int, List[Gatherer]]:
    return {c.cid: find_gatherers(cp, p, c) for c in cp.of_kind(FLEX_KIND) if not cp.touches(c, DCC_KIND)}


# -- cluster hypergraph ----------------------------------------------------

@dataclass
class ClusterHypergraph:
    h: Multihypergraph
    provenance: Dict[int, Tuple[str, int]]   # edge id -> (family, gatherer node or cluster id)

    def to_json(self) -> dict:
        return {str(e): list(p) for e, p in sorted(self.provenance.items())}


def build_cluster_hypergraph(cp: ClusterPartition, gatherers: Mapping[int, List[Gatherer]]) -> ClusterHypergraph:
    nodes = [c.cid for c in cp.of_kind(FLEX_KIND) + cp.of_kind(LINK_KIND)]
    edges: List[Tuple[int, Tuple[int, ...]]] = []
    prov: Dict[int, Tuple[str, int]] = {}

    def emit(members: Tuple[int, ...], tag: str, ref: int) -> None:
        eid = len(edges)
        edges.append((eid, members))
        prov[eid] = (tag, ref)

    for c in cp.of_kind(FLEX_KIND) + cp.of_kind(LINK_KIND):
        if cp.touches(c, DCC_KIND):
            emit((c.cid,), "dcc-adjacency", c.cid)
    for c in cp.of_kind(FLEX_KIND):
        for gt in gatherers.get(c.cid, ()):
            emit((c.cid,) + gt.conflicts, "gatherer", gt.v)
    for link in cp.of_kind(LINK_KIND):
        adj = sorted({cp.cluster_of[w] for w in neighborhood(cp.g, link.nodes)
                      if cp.kind_of(w) == FLEX_KIND})
        for f in adj:
            if all(link.cid not in gt.conflicts for gt in gatherers.get(f, ())):
                emit((link.cid,), "safe-flex", f)
    return ClusterHypergraph(Multihypergraph(nodes, edges), prov)


def hypergraph_bounds(ch: ClusterHypergraph, delta: int, p: Params) -> dict:
    """Rank and degree figures next to the parametric bounds they should meet."""
    h = ch.h
    rank1 = {h.members(e)[0] for e, _ in h.hyperedges() if h.rank(e) == 1}
    exp = p.alpha_flex // 2 - 2
    deg_bound = max(1, (delta - 1) ** exp) if exp >= 0 else 1
    rank_bound = 1 + (delta - 1) ** 3
    needy = [v for v in h.nodes if v not in rank1]
    return {
        "max_rank": h.max_rank(),
        "rank_bound": rank_bound,
        "min_degree": h.min_degree(),
        "min_degree_needy": min((h.degree(v) for v in needy), default=None),
        "degree_bound": deg_bound,
        "rank1_nodes": len(rank1),
        "nodes": len(h.nodes),
        "rank_ok": h.max_rank() <= rank_bound,
        "degree_ok": all(h.degree(v) >= deg_bound for v in needy),
    }


# -- verification ----------------------------------------------------------

def verify_partition(cp: ClusterPartition, p: Optional[Params] = None) -> List[Violation]:
    g = cp.g
    out: List[Violation] = []
    seen: Dict[int, int] = {}
    for cid, c in sorted(cp.clusters.items()):
        if not c.nodes:
            out.append(Violation("empty-cluster", f"cluster {cid} is empty"))
        for v in c.nodes:
            if v in seen:
                out.append(Violation("overlap", f"node {v} in clusters {seen[v]} and {cid}", (v,)))
            seen[v] = cid
    for v in g.nodes:
        if v not in seen:
            out.append(Violation("uncovered", f"node {v} in no cluster", (v,)))
    kind_of = {v: cp.clusters[cid].kind for v, cid in seen.items()}

    # item 2: flexible subgraphs
    flex_sets = []
    for c in cp.of_kind(DCC_KIND):
        f = c.flexible
        if f is None or not set(f.nodes) <= set(c.nodes):
            out.append(Violation("dcc-core", f"dcc cluster {c.cid} lacks a flexible subgraph inside it"))
            continue
        if f.kind == LOW_DEGREE:
            if len(f.nodes) != 1 or g.degree(f.nodes[0]) >= cp.delta:
                out.append(Violation("dcc-core", f"cluster {c.cid}: core is not a low-degree node", f.nodes))
        elif classify(induced_subgraph(g, f.nodes)) != "dcc":
            out.append(Violation("dcc-core", f"cluster {c.cid}: core is not a DCC", f.nodes))
        flex_sets.append((c.cid, set(f.nodes)))
    holder = {v: cid for cid, s in flex_sets for v in s}
    for cid, s in flex_sets:
        for v in s:
            for w in g.neighbors(v):
                other = holder.get(w)
                if other is not None and other != cid:
                    out.append(Violation("dcc-core-adjacent", f"cores of clusters {cid} and {other} touch", (v, w)))

    # item 3 and flex separation
    flex_owner = {}
    for c in cp.of_kind(FLEX_KIND):
        if c.center is None or c.center not in c.nodes:
            out.append(Violation("flex-center", f"flex cluster {c.cid} has no center inside it"))
        for v in c.nodes:
            flex_owner[v] = c.cid
    for u, v in g.edges():
        a, b = flex_owner.get(u), flex_owner.get(v)
        if a is not None and b is not None and a != b:
            out.append(Violation("flex-adjacent", f"flex clusters {a} and {b} are adjacent", (u, v)))

    # item 4: escape paths
    for c in cp.of_kind(FLEX_KIND):
        if c.center not in c.nodes:
            continue
        members = set(c.nodes)
        depth = distances_from(g, c.center, allowed=members)
        exits = {v for v in members
                 if any(kind_of.get(w) in (DCC_KIND, LINK_KIND) for w in g.neighbors(v))}
        for v in c.nodes:
            if v not in depth:
                continue
            dv = depth[v]
            ok = v in exits
            stack, seen_v = [v], {v}
            while stack and not ok:
                x = stack.pop()
                for w in g.neighbors(x):
                    if w in members and w not in seen_v and depth.get(w, INF) > dv:
                        if w in exits:
                            ok = True
                            break
                        seen_v.add(w)
                        stack.append(w)
            if not ok:
                out.append(Violation("escape-path", f"flex cluster {c.cid}: node {v} has no outward path", (v,)))

    # item 5
    for c in cp.of_kind(LINK_KIND):
        if not any(kind_of.get(w) in (DCC_KIND, FLEX_KIND) for w in neighborhood(g, c.nodes)):
            out.append(Violation("link-isolated", f"link cluster {c.cid} touches no dcc or flex cluster"))

    # item 6
    for cid, c in sorted(cp.clusters.items()):
        if c.nodes and strong_diameter(g, c.nodes) == INF:
            out.append(Violation("disconnected", f"cluster {cid} ({c.kind}) is not connected"))
    if p is not None:
        for c in cp.of_kind(FLEX_KIND):
            if c.center in c.nodes:
                far = distances_from(g, c.center, allowed=set(c.nodes))
                if max(far.values()) > p.alpha_flex:
                    out.append(Violation("flex-radius", f"flex cluster {c.cid} exceeds radius alpha_flex"))
    return out


def write_partition(cp: ClusterPartition) -> str:
    return "".join(f"{v} {cp.kind_of(v)} {cp.cluster_of[v]}\n" for v in sorted(cp.cluster_of))


def read_partition(g: Graph, text: str, delta: Optional[int] = None) -> ClusterPartition:
    """Rebuild a partition from "node kind cluster_id" lines.

    Flexible subgraphs and centers are not in the file, so they are
    re-derived: the core of a dcc cluster is its lowest-id low-degree node
    if any, else the cluster itself; the flex center is the node of
    smallest eccentricity inside the cluster.
    """
    delta = g.max_degree() if delta is None else delta
    kinds: Dict[int, str] = {}
    groups: Dict[int, List[int]] = {}
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        v, kind, cid = ln.split()
        v, cid = int(v), int(cid)
        if kinds.setdefault(cid, kind) != kind:
            raise ValueError(f"cluster {cid} has mixed kinds")
        groups.setdefault(cid, []).append(v)
    cp = ClusterPartition(g, delta)
    for cid in sorted(groups):
        nodes = tuple(sorted(groups[cid]))
        kind = kinds[cid]
        c = Cluster(cid, kind, nodes)
        if kind == DCC_KIND:
            low = [v for v in nodes if v in g and g.degree(v) < delta]
            c.flexible = (FlexibleSubgraph(LOW_DEGREE, (low[0],), 0) if low
                          else FlexibleSubgraph(DCC, nodes, 0))
        elif kind == FLEX_KIND:
            c.center = min(nodes, key=lambda v: (max(distances_from(g, v, allowed=set(nodes)).values()), v))
        for v in nodes:
            if v in cp.cluster_of:
                raise ValueError(f"node {v} listed twice")
        cp.clusters[cid] = c
        for v in nodes:
            cp.cluster_of[v] = cid
    return cp
