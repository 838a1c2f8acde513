"""Hypergraph sinkless orientation: verifier, exact matching solver, distributed solver."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

from .graph import GraphError, Multihypergraph
from .local import NodeProgram, RoundCapExceeded, Step, run_on_virtual
from .primitives import Violation

Orientation = Dict[int, int]


def verify_hso(h: Multihypergraph, o: Mapping[int, int]) -> Optional[Violation]:
    for eid, members in h.hyperedges():
        if eid not in o:
            raise ValueError(f"hyperedge {eid} has no owner")
        if o[eid] not in members:
            raise ValueError(f"owner {o[eid]} of hyperedge {eid} is not a member")
    owners = set(o.values())
    for v in h.nodes:
        if v not in owners:
            return Violation("sink", f"node {v} owns no hyperedge", (v,))
    return None


@dataclass
class HSOSolution:
    orientation: Optional[Orientation]
    hall_set: Tuple[int, ...] = ()
    partial: Orientation = field(default_factory=dict)
    sinks: Tuple[int, ...] = ()

    @property
    def feasible(self) -> bool:
        return self.orientation is not None


def _complete(h: Multihypergraph, match: Mapping[int, int]) -> Orientation:
    """Matched edges go to their node; the rest to their lowest-id member."""
    o = {e: v for v, e in match.items()}
    for eid, members in h.hyperedges():
        o.setdefault(eid, members[0])
    return o


def max_node_matching(h: Multihypergraph) -> Dict[int, int]:
    """Maximum matching node -> incident hyperedge via augmenting paths (iterative)."""
    match_node: Dict[int, int] = {}
    match_edge: Dict[int, int] = {}
    for root in h.nodes:
        # DFS over alternating paths starting at root
        parent_edge: Dict[int, Optional[int]] = {root: None}
        via: Dict[int, int] = {}
        stack = [root]
        found = None
        seen_edges = set()
        while stack and found is None:
            v = stack.pop()
            for e in h.incident(v):
                if e in seen_edges:
                    continue
                seen_edges.add(e)
                via[e] = v
                if e not in match_edge:
                    found = e
                    break
                w = match_edge[e]
                if w not in parent_edge:
                    parent_edge[w] = e
                    stack.append(w)
        if found is None:
            continue
        e = found
        while True:
            v = via[e]
            prev = parent_edge[v]
            match_node[v] = e
            match_edge[e] = v
            if prev is None:
                break
            e = prev
    return match_node


def hall_violator(h: Multihypergraph, match: Mapping[int, int]) -> Tuple[int, ...]:
    """Nodes reachable by alternating paths from the lowest unmatched node."""
    free = [v for v in h.nodes if v not in match]
    if not free:
        return ()
    owner_of = {e: v for v, e in match.items()}
    reach = {free[0]}
    stack = [free[0]]
    while stack:
        v = stack.pop()
        for e in h.incident(v):
            w = owner_of.get(e)
            if w is not None and w not in reach:
                reach.add(w)
                stack.append(w)
    return tuple(sorted(reach))


def hso_exact(h: Multihypergraph) -> HSOSolution:
    match = max_node_matching(h)
    partial = _complete(h, match)
    if len(match) == len(h.nodes):
        return HSOSolution(partial, (), partial, ())
    sinks = tuple(v for v in h.nodes if v not in match)
    return HSOSolution(None, hall_violator(h, match), partial, sinks)


def hall_deficit(h: Multihypergraph, a) -> int:
    """|A| minus the number of hyperedges touching A."""
    a = set(a)
    touching = {e for v in a for e in h.incident(v)}
    return len(a) - len(touching)


@dataclass(frozen=True)
class DegreeRank:
    delta: int
    r: int
    ratio: float
    satisfies_randomized: bool
    log_base: int = 2

    def to_json(self) -> dict:
        return {"delta": self.delta, "r": self.r, "ratio": self.ratio,
                "satisfies_randomized": self.satisfies_randomized, "log_base": self.log_base}


def randomized_threshold(r: int) -> float:
    return 320 * r * math.log2(r) if r > 0 else 0.0


def check_degree_rank(h: Multihypergraph) -> DegreeRank:
    delta = h.min_degree()
    r = h.max_rank()
    ratio = delta / r if r else math.inf
    return DegreeRank(delta, r, ratio, delta > randomized_threshold(r))


# -- distributed solver ----------------------------------------------------

class GrabProgram(NodeProgram):
    """Sinks propose for unowned hyperedges (lowest proposer id wins) or ask a
    rich owner to hand one over; a node halts once it and all co-members own
    something.  ``ctx.input`` is {edge id: members} for the node's edges.
    """

    def __init__(self, randomized: bool = False):
        self.randomized = randomized

    def init(self, ctx):
        edges = ctx.input
        owner = {e: None for e in edges}
        mine = set()
        for e, mem in edges.items():
            if len(mem) == 1:
                owner[e] = ctx.id
                mine.add(e)
        st = {"owner": owner, "mine": mine, "counts": {}, "prop": None, "grants": []}
        if mine and not ctx.neighbors:
            return Step(st, {}, True, frozenset(mine))
        return self._act(ctx, st)

    def _act(self, ctx, st):
        edges = ctx.input
        out: Dict[int, dict] = {u: {"n": len(st["mine"]), "p": [], "g": [], "s": []} for u in ctx.neighbors}
        for e, new in st["grants"]:
            for u in edges[e]:
                if u != ctx.id:
                    out[u]["g"].append((e, new))
        st["grants"] = []
        st["prop"] = None
        if not st["mine"]:
            free = sorted(e for e, o in st["owner"].items() if o is None)
            if free:
                e = ctx.rng.choice(free) if self.randomized else free[0]
                st["prop"] = e
                for u in edges[e]:
                    if u != ctx.id:
                        out[u]["p"].append(e)
            else:
                rich = sorted(e for e, o in st["owner"].items()
                              if o is not None and o != ctx.id and st["counts"].get(o, 0) >= 2)
                if rich:
                    e = rich[0]
                    out[st["owner"][e]]["s"].append(e)
        done = bool(st["mine"]) and all(st["counts"].get(u, 0) >= 1 for u in ctx.neighbors)
        return Step(st, out, done, frozenset(st["mine"]) if done else None)

    def step(self, ctx, st, inbox):
        owner, mine = st["owner"], st["mine"]
        for u, msg in sorted(inbox.items()):
            st["counts"][u] = msg["n"]
            for e, new in msg["g"]:
                owner[e] = new
                if new == ctx.id:
                    mine.add(e)
        proposals: Dict[int, List[int]] = {}
        if st["prop"] is not None:
            proposals[st["prop"]] = [ctx.id]
        for u, msg in sorted(inbox.items()):
            for e in msg["p"]:
                proposals.setdefault(e, []).append(u)
        for e, who in proposals.items():
            if owner[e] is None:
                owner[e] = min(who)
                if owner[e] == ctx.id:
                    mine.add(e)
        requests: Dict[int, List[int]] = {}
        for u, msg in sorted(inbox.items()):
            for e in msg["s"]:
                requests.setdefault(e, []).append(u)
        for e in sorted(requests):
            if e in mine and len(mine) >= 2:
                new = min(requests[e])
                mine.discard(e)
                owner[e] = new
                st["grants"].append((e, new))
                st["counts"][new] = max(st["counts"].get(new, 0), 1)
        return self._act(ctx, st)


@dataclass
class DistributedHSO:
    orientation: Orientation
    rounds: int
    fallback: bool


def hso_distributed(h: Multihypergraph, seed: int = 0, round_cap: int = 2000, dilation: int = 1,
                    randomized: bool = False) -> DistributedHSO:
    """Run the grabbing protocol; on a cap hit fall back to :func:`hso_exact`.

    Grants are recorded by the receiving node, so the orientation is read
    from the union of every node's owned set.
    """
    inputs = {v: {e: h.members(e) for e in h.incident(v)} for v in h.nodes}
    try:
        rep = run_on_virtual(h, dilation, GrabProgram(randomized), seed=seed, round_cap=round_cap,
                             inputs=inputs, randomized=randomized, phase="hso")
    except RoundCapExceeded:
        sol = hso_exact(h)
        if not sol.feasible:
            raise HSOInfeasible(sol)
        return DistributedHSO(sol.orientation, round_cap * dilation, True)
    o: Orientation = {}
    for v in h.nodes:
        for e in sorted(rep.outputs.get(v, ())):
            o[e] = v
    for eid, members in h.hyperedges():
        o.setdefault(eid, members[0])
    return DistributedHSO(o, rep.rounds_total, False)


class HSOInfeasible(RuntimeError):
    def __init__(self, sol: HSOSolution):
        super().__init__(f"no sinkless orientation; Hall violator of size {len(sol.hall_set)}")
        self.solution = sol


# -- text formats ----------------------------------------------------------

def write_hypergraph(h: Multihypergraph) -> str:
    edges = list(h.hyperedges())
    lines = [f"{len(h.nodes)} {len(edges)}"]
    for eid, mem in edges:
        lines.append(" ".join(str(x) for x in (eid, len(mem), *mem)))
    return "\n".join(lines) + "\n"


def read_hypergraph(text: str) -> Multihypergraph:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if not lines:
        raise GraphError("empty hypergraph file")
    n, m = (int(x) for x in lines[0].split())
    if len(lines) - 1 != m:
        raise GraphError(f"header promises {m} hyperedges, found {len(lines) - 1}")
    edges = []
    for ln in lines[1:]:
        parts = [int(x) for x in ln.split()]
        eid, k, mem = parts[0], parts[1], parts[2:]
        if len(mem) != k:
            raise GraphError(f"hyperedge {eid}: declared rank {k}, got {len(mem)} members")
        edges.append((eid, mem))
    return Multihypergraph(range(n), edges)


def write_orientation(o: Mapping[int, int]) -> str:
    return "".join(f"{e} {o[e]}\n" for e in sorted(o))


def read_orientation(text: str) -> Orientation:
    o: Orientation = {}
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        e, v = (int(x) for x in ln.split())
        o[e] = v
    return o
