"""End-to-end Delta-coloring: partition, hypergraph orientation, flexibility sets, layered completion."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

from .clusters import (DCC_KIND, FLEX_KIND, LINK_KIND, SCALED_DEFAULT, ClusterHypergraph,
                       ClusterPartition, Gatherer, Params, build_cluster_hypergraph, build_partition,
                       find_all_gatherers, hypergraph_bounds, verify_partition)
from .dcc import LOW_DEGREE, FlexibleSubgraph, classify, color_flexible
from .graph import INF, Graph, bfs_layers, connected_components, induced_subgraph, weak_diameter
from .hso import HSOInfeasible, check_degree_rank, hso_distributed, verify_hso
from .primitives import Coloring, Violation, d1lc_solve, greedy_color_reduction, layered_color, verify_proper

REPORT_SCHEMA = 1


class UnsolvableError(ValueError):
    def __init__(self, problems: List[str]):
        super().__init__("unsolvable component: " + "; ".join(problems))
        self.problems = problems


class PipelineError(RuntimeError):
    def __init__(self, phase: str, violations):
        self.phase = phase
        self.violations = list(violations)
        shown = "; ".join(str(v) for v in self.violations[:5])
        super().__init__(f"{phase}: {shown}")


# -- preconditions ---------------------------------------------------------

def solvability_check(g: Graph) -> List[str]:
    """Empty list if every component can be Delta-colored and Delta >= 3."""
    delta = g.max_degree()
    bad = []
    if delta <= 2:
        bad.append(f"max degree {delta} <= 2 (Δ ≥ 3 required)")
    for comp in connected_components(g):
        h = induced_subgraph(g, comp)
        k = len(comp)
        if k == delta + 1 and h.m == k * (k - 1) // 2:
            bad.append(f"(Δ+1)-clique on nodes {list(comp[:8])}")
        elif delta == 2 and k >= 3 and h.m == k and k % 2 == 1 and h.max_degree() == 2:
            bad.append(f"odd cycle on nodes {list(comp[:8])}")
    return bad


def verify_coloring(g: Graph, coloring: Mapping[int, int], max_color: int) -> Optional[Violation]:
    bad = verify_proper(g, coloring)
    if bad is not None:
        return bad
    for v in g.nodes:
        c = coloring[v]
        if not 1 <= c <= max_color:
            return Violation("range", f"node {v} has color {c} outside 1..{max_color}", (v,))
    return None


# -- flexibility sets ------------------------------------------------------

@dataclass
class FlexibilitySets:
    S: List[FlexibleSubgraph]
    I: Tuple[int, ...]
    T_I: Tuple[int, ...]
    layer: Dict[int, float] = field(default_factory=dict)
    d_measured: int = 0
    k_measured: int = 0

    def W(self) -> set:
        return set(self.T_I) | {v for s in self.S for v in s.nodes}

    def to_json(self) -> dict:
        return {"|I|": len(self.I), "|S|": len(self.S), "|T_I|": len(self.T_I),
                "d_measured": self.d_measured, "k_measured": self.k_measured}


def _measure(g: Graph, S: List[FlexibleSubgraph], I: Tuple[int, ...]) -> FlexibilitySets:
    iset = set(I)
    t_i = tuple(sorted(v for v in g.nodes if v not in iset and sum(w in iset for w in g.neighbors(v)) >= 2))
    fs = FlexibilitySets(S, I, t_i)
    rest = [v for v in g.nodes if v not in iset]
    w = fs.W()
    if w:
        layer = bfs_layers(g, sorted(w), allowed=set(rest))
        fs.layer = {v: layer[v] for v in rest}
    else:
        fs.layer = {v: INF for v in rest}
    finite = [x for x in fs.layer.values() if x != INF]
    fs.d_measured = int(max(finite, default=0))
    fs.k_measured = int(max((s.weak_diameter for s in S), default=0))
    return fs


def derive_s_and_i(g: Graph, cp: ClusterPartition, gatherers: Mapping[int, List[Gatherer]],
                   ch: ClusterHypergraph, o: Mapping[int, int]) -> FlexibilitySets:
    """S from the dcc clusters; one gatherer pair per flex cluster that owns a gatherer edge."""
    S = [c.flexible for c in cp.of_kind(DCC_KIND)]
    by_node = {gt.v: gt for gs in gatherers.values() for gt in gs}
    I: List[int] = []
    for c in cp.of_kind(FLEX_KIND):
        owned = sorted(ref for e, (tag, ref) in ch.provenance.items() if tag == "gatherer" and o.get(e) == c.cid)
        if owned:
            I.extend(by_node[owned[0]].pair)
    return _measure(g, S, tuple(sorted(I)))


def audit_flexibility(g: Graph, fs: FlexibilitySets, delta: int, d_cap: Optional[int] = None,
                      k_cap: Optional[int] = None) -> List[Violation]:
    """Check the four conditions the layered completion relies on."""
    out: List[Violation] = []
    owner: Dict[int, int] = {}
    for i, s in enumerate(fs.S):
        if s.kind == LOW_DEGREE:
            if len(s.nodes) != 1 or g.degree(s.nodes[0]) >= delta:
                out.append(Violation("flexible", f"member {s.nodes} is not a low-degree singleton", s.nodes))
        elif classify(induced_subgraph(g, s.nodes)) != "dcc":
            out.append(Violation("flexible", f"member {s.nodes[:8]} is not a DCC", s.nodes))
        elif k_cap is not None and weak_diameter(g, s.nodes) > k_cap:
            out.append(Violation("flexible", f"member {s.nodes[:8]} has weak diameter above {k_cap}", s.nodes))
        for v in s.nodes:
            if v in owner:
                out.append(Violation("overlap", f"node {v} in two members of S", (v,)))
            owner[v] = i
    for v, i in owner.items():
        for w in g.neighbors(v):
            j = owner.get(w)
            if j is not None and j != i:
                out.append(Violation("s-adjacent", f"members {i} and {j} of S are adjacent", (v, w)))
    iset = set(fs.I)
    for u, v in g.edges():
        if u in iset and v in iset:
            out.append(Violation("i-edge", f"I contains the edge {u}-{v}", (u, v)))
    for v in sorted(iset & set(owner)):
        out.append(Violation("i-in-s", f"node {v} is in both I and S", (v,)))
    far = sorted(v for v, x in fs.layer.items() if x == INF)
    if far:
        out.append(Violation("unreached", f"{len(far)} nodes cannot reach W outside I, e.g. {far[:5]}", tuple(far[:5])))
    if d_cap is not None and fs.d_measured > d_cap:
        out.append(Violation("depth", f"measured d = {fs.d_measured} exceeds cap {d_cap}"))
    return out


def color_with_flexibility(g: Graph, fs: FlexibilitySets, delta: int, backend: str = "greedy",
                           seed: int = 0) -> Tuple[Coloring, Dict[str, int]]:
    palette = tuple(range(1, delta + 1))
    col: Coloring = {v: 1 for v in fs.I}
    layer = {v: int(x) for v, x in fs.layer.items() if x != INF and x >= 1}
    part, r_layers = layered_color(g, layer, {v: palette for v in layer}, backend, seed, precolored=col)
    col.update(part)

    t_set = set(fs.T_I)
    s_at = {s.nodes[0]: s for s in fs.S}
    in_s = {v for s in fs.S for v in s.nodes}
    for comp in connected_components(g, allowed=fs.W()):
        for v in comp:
            if v in t_set and v not in in_s:
                taken = {col[x] for x in g.neighbors(v) if x in col}
                free = [c for c in palette if c not in taken]
                if not free:
                    raise PipelineError("layer0", [Violation("slack", f"T_I node {v} has no free color", (v,))])
                col[v] = free[0]
        for v in comp:
            s = s_at.get(v)
            if s is None:
                continue
            lists = {}
            for u in s.nodes:
                taken = {col[x] for x in g.neighbors(u) if x in col}
                lists[u] = [c for c in palette if c not in taken]
            col.update(color_flexible(g, s, lists))
    rounds = {"layers": r_layers, "layer0": fs.k_measured + 1}
    return col, rounds


# -- the full pipeline -----------------------------------------------------

def _dilation(gamma: Mapping[str, float]) -> int:
    g = max(int(gamma.get(FLEX_KIND, 0)), int(gamma.get(LINK_KIND, 0)), 1)
    return 2 * g + 2


def d_cap_for(gamma: Mapping[str, float], p: Params) -> int:
    """Bound on d used by the audit: a path that crosses one cluster of each kind plus slack."""
    return int(gamma[DCC_KIND] + 2 * gamma[FLEX_KIND] + gamma[LINK_KIND]) + p.beta_flex + 2


def delta_color(g: Graph, p: Params = SCALED_DEFAULT, seed: int = 0, backend: Optional[str] = None,
                hso_round_cap: int = 2000, allow_partial_hso: bool = True,
                artifacts: Optional[dict] = None) -> Tuple[Coloring, dict]:
    """Proper coloring with colors 1..Delta, plus a JSON-ready report.

    If ``artifacts`` is a dict it receives the intermediate structures
    (partition, gatherers, hypergraph, orientation, flexibility sets).
    """
    problems = solvability_check(g)
    if problems:
        raise UnsolvableError(problems)
    delta = g.max_degree()
    backend = backend or ("greedy" if p.mode == "det" else "luby")
    cp = build_partition(g, p, seed)
    bad = verify_partition(cp, p)
    if bad:
        raise PipelineError("partition", bad)
    gamma = cp.gammas()
    rounds = dict(cp.rounds)

    gatherers = find_all_gatherers(cp, p)
    ch = build_cluster_hypergraph(cp, gatherers)
    bounds = hypergraph_bounds(ch, delta, p)
    partial = False
    dil = _dilation(gamma)
    if ch.h.nodes:
        try:
            sol = hso_distributed(ch.h, seed, hso_round_cap, dil, randomized=p.mode == "rand")
            o, rounds["hso"], fallback = sol.orientation, sol.rounds, sol.fallback
        except HSOInfeasible as exc:
            if not allow_partial_hso:
                raise
            o, rounds["hso"], fallback, partial = exc.solution.partial, hso_round_cap * dil, True, True
        if not partial and verify_hso(ch.h, o) is not None:
            raise PipelineError("hso", [verify_hso(ch.h, o)])
    else:
        o, fallback = {}, False
        rounds["hso"] = 0

    fs = derive_s_and_i(g, cp, gatherers, ch, o)
    cap = d_cap_for(gamma, p)
    audit = audit_flexibility(g, fs, delta, d_cap=cap)
    if audit:
        raise PipelineError("flexibility", audit)
    rounds["derive"] = max(int(gamma[DCC_KIND]), int(gamma[FLEX_KIND]), int(gamma[LINK_KIND]), 1)

    if artifacts is not None:
        artifacts.update(partition=cp, gatherers=gatherers, hypergraph=ch, orientation=o, flex_sets=fs)
    col, r_color = color_with_flexibility(g, fs, delta, backend, seed)
    rounds.update(r_color)
    bad = verify_coloring(g, col, delta)
    if bad is not None:
        raise PipelineError("coloring", [bad])

    dr = check_degree_rank(ch.h) if ch.h.edge_ids else None
    report = {
        "schema": REPORT_SCHEMA,
        "pipeline": "delta",
        "graph": {"n": g.n, "m": g.m, "delta": delta},
        "params": p.to_json(),
        "paper_constants": p.paper_constants,
        "seed": seed,
        "backend": backend,
        "rounds_by_phase": dict(sorted(rounds.items())),
        "rounds_total": sum(rounds.values()),
        "clusters": cp.counts(),
        "gamma": {k: (None if v == INF else int(v)) for k, v in gamma.items()},
        "gatherers": sum(len(v) for v in gatherers.values()),
        "hypergraph": {
            "max_rank": bounds["max_rank"], "min_degree": bounds["min_degree"],
            "rank1_nodes": bounds["rank1_nodes"], "nodes": bounds["nodes"],
            "edges": len(ch.h.edge_ids), "rank_bound": bounds["rank_bound"],
            "degree_bound": bounds["degree_bound"], "rank_ok": bounds["rank_ok"],
            "degree_ok": bounds["degree_ok"],
            "degree_rank": dr.to_json() if dr else None,
        },
        "hso": {"dilation": dil, "fallback": fallback, "partial": partial},
        "flex_sets": fs.to_json(),
        "d_cap": cap,
        "colors_used": len(set(col.values())),
        "verified": True,
    }
    return col, report


# -- bounded clique number -------------------------------------------------

def find_clique(g: Graph, size: int) -> Optional[Tuple[int, ...]]:
    """Some clique of the given size, by extending over higher-id neighbors."""
    def extend(clique: Tuple[int, ...], cands: List[int]) -> Optional[Tuple[int, ...]]:
        if len(clique) == size:
            return clique
        for i, v in enumerate(cands):
            if len(clique) + len(cands) - i < size:
                return None
            nxt = [w for w in cands[i + 1:] if g.has_edge(v, w)]
            hit = extend(clique + (v,), nxt)
            if hit:
                return hit
        return None

    for v in g.nodes:
        hit = extend((v,), [w for w in g.neighbors(v) if w > v])
        if hit:
            return hit
    return None


def delta_color_bounded_clique(g: Graph, omega: int, p: Params = SCALED_DEFAULT, seed: int = 0,
                               backend: Optional[str] = None) -> Tuple[Coloring, dict]:
    if omega < 3:
        raise ValueError(f"omega must be >= 3, got {omega}")
    delta = g.max_degree()
    if delta < omega:
        raise ValueError(f"max degree {delta} is below omega {omega}")
    k = find_clique(g, omega + 1)
    if k is not None:
        raise UnsolvableError([f"K_{omega + 1} found on nodes {list(k)}"])
    backend = backend or ("greedy" if p.mode == "det" else "luby")
    rounds: Dict[str, int] = {}

    full = {v: tuple(range(1, delta + 2)) for v in g.nodes}
    col, rounds["d1lc"] = d1lc_solve(g, full, backend, seed)
    col = greedy_color_reduction(g, col, range(1, omega + 2), range(omega + 2, delta + 2))
    rounds["reduction"] = omega + 1

    low = [v for v in g.nodes if col[v] <= omega + 1]
    h = induced_subgraph(g, low)
    if h.max_degree() > omega:
        raise PipelineError("reduction", [Violation("degree", f"reduced subgraph has max degree {h.max_degree()}")])

    # recolor H with omega colors, component by component
    sub: Coloring = {}
    inner_reports = []
    for comp in connected_components(h):
        hc = induced_subgraph(h, comp)
        dc = hc.max_degree()
        if dc < omega:
            part, r = d1lc_solve(hc, {v: tuple(range(1, omega + 1)) for v in hc.nodes}, backend, seed)
            rounds["inner_d1lc"] = max(rounds.get("inner_d1lc", 0), r)
        else:
            part, rep = delta_color(hc, p, seed, backend)
            inner_reports.append(rep)
            rounds["inner_delta"] = max(rounds.get("inner_delta", 0), rep["rounds_total"])
        sub.update(part)
    col.update(sub)
    # color omega+1 is now unused; close the gap
    col = {v: (c - 1 if c > omega + 1 else c) for v, c in col.items()}
    bad = verify_coloring(g, col, delta)
    if bad is not None:
        raise PipelineError("coloring", [bad])
    report = {
        "schema": REPORT_SCHEMA,
        "pipeline": "bounded-clique",
        "graph": {"n": g.n, "m": g.m, "delta": delta},
        "omega": omega,
        "params": p.to_json(),
        "paper_constants": p.paper_constants,
        "seed": seed,
        "backend": backend,
        "rounds_by_phase": dict(sorted(rounds.items())),
        "rounds_total": sum(rounds.values()),
        "reduced_max_degree": h.max_degree(),
        "inner_runs": len(inner_reports),
        "colors_used": len(set(col.values())),
        "verified": True,
    }
    return col, report


def dumps_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2)
