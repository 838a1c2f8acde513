"""MIS backends, degree+1-list-coloring, layered coloring, color reduction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .graph import Graph, induced_subgraph
from .local import NodeProgram, RoundCapExceeded, RunReport, Step, run

Coloring = Dict[int, int]
Lists = Dict[int, Tuple[int, ...]]


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str
    nodes: Tuple[int, ...] = ()

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}"


class ListColoringError(RuntimeError):
    def __init__(self, node: int, msg: str):
        super().__init__(f"node {node}: {msg}")
        self.node = node


@dataclass
class MISResult:
    nodes: frozenset
    rounds: int


# -- MIS -------------------------------------------------------------------

def verify_mis(g: Graph, s: Iterable[int]) -> Optional[Violation]:
    members = set(s)
    for v in sorted(members):
        if v not in g:
            return Violation("unknown", f"node {v} not in graph", (v,))
    for u, v in g.edges():
        if u in members and v in members:
            return Violation("edge", f"edge {u}-{v} inside the set", (u, v))
    for v in g.nodes:
        if v not in members and not any(w in members for w in g.neighbors(v)):
            return Violation("uncovered", f"node {v} uncovered", (v,))
    return None


def mis_greedy(g: Graph) -> frozenset:
    """Lexicographically-first MIS: scan ids ascending, take every free node."""
    chosen = set()
    blocked = set()
    for v in g.nodes:
        if v in blocked:
            continue
        chosen.add(v)
        blocked.update(g.neighbors(v))
    return frozenset(chosen)


class LocalMinMIS(NodeProgram):
    """Undecided nodes whose id beats every undecided neighbor join.

    Produces the same set as :func:`mis_greedy`.
    """

    def init(self, ctx):
        live = set(ctx.neighbors)
        return self._try_join(ctx, live)

    def _try_join(self, ctx, live):
        if all(ctx.id < w for w in live):
            return Step(None, {w: "in" for w in live}, True, True)
        return Step(live)

    def step(self, ctx, live, inbox):
        if any(m == "in" for m in inbox.values()):
            others = live - set(inbox)
            return Step(None, {w: "out" for w in others}, True, False)
        live = live - {w for w, m in inbox.items() if m == "out"}
        return self._try_join(ctx, live)


class LubyMIS(NodeProgram):
    """Three rounds per iteration: mark, resolve, prune."""

    def init(self, ctx):
        return self._mark(ctx, set(ctx.neighbors))

    def _mark(self, ctx, live):
        if not live:
            return Step(None, {}, True, True)
        d = len(live)
        marked = ctx.rng.random() < 1.0 / (2 * d)
        return Step(("marked", live, marked, d), {w: (marked, d) for w in live})

    def step(self, ctx, state, inbox):
        tag, live = state[0], state[1]
        if tag == "marked":
            _, _, marked, d = state
            if marked:
                beaten = any(m and (dw, w) > (d, ctx.id) for w, (m, dw) in inbox.items())
                if not beaten:
                    return Step(None, {w: "in" for w in live}, True, True)
            return Step(("resolve", live))
        if tag == "resolve":
            if any(m == "in" for m in inbox.values()):
                return Step(None, {w: "out" for w in live if w not in inbox}, True, False)
            return Step(("prune", live))
        # prune
        live = live - {w for w, m in inbox.items() if m == "out"}
        return self._mark(ctx, live)


def _outputs_to_set(rep: RunReport) -> frozenset:
    return frozenset(v for v, out in rep.outputs.items() if out)


def mis_local_min(g: Graph, round_cap: int = 100_000) -> MISResult:
    rep = run(g, LocalMinMIS(), round_cap=round_cap, phase="mis")
    return MISResult(_outputs_to_set(rep), rep.rounds_total)


def mis_luby(g: Graph, seed: int = 0, round_cap: int = 3000, retries: int = 5) -> MISResult:
    """Luby's algorithm on the simulator; on a cap hit, retry with a derived seed."""
    rounds_spent = 0
    for attempt in range(retries + 1):
        s = seed if attempt == 0 else seed * 1_000_003 + attempt
        try:
            rep = run(g, LubyMIS(), seed=s, round_cap=round_cap, randomized=True, phase="mis")
        except RoundCapExceeded:
            rounds_spent += round_cap
            continue
        return MISResult(_outputs_to_set(rep), rounds_spent + rep.rounds_total)
    raise RuntimeError(f"Luby MIS failed after {retries + 1} attempts")


def _ball_lists(g: Graph, k: int, allowed: Optional[set]) -> Dict[int, List[int]]:
    """For each node, the other nodes within distance k (restricted to ``allowed``)."""
    nodes = [v for v in g.nodes if allowed is None or v in allowed]
    out = {}
    for v in nodes:
        seen = {v}
        frontier = [v]
        for _ in range(k):
            nxt = []
            for x in frontier:
                for w in g.neighbors(x):
                    if w not in seen and (allowed is None or w in allowed):
                        seen.add(w)
                        nxt.append(w)
            if not nxt:
                break
            frontier = nxt
        seen.discard(v)
        out[v] = sorted(seen)
    return out


def greedy_mis_power(g: Graph, k: int, allowed: Optional[Iterable[int]] = None) -> MISResult:
    """Lexicographically-first MIS of G[allowed]^k without building the power graph.

    ``rounds`` is what the local-min program would use on the power graph
    (virtual rounds), so callers multiply by k for real rounds.
    """
    allowed_set = set(allowed) if allowed is not None else None
    balls = _ball_lists(g, k, allowed_set)
    join: Dict[int, int] = {}
    out: Dict[int, int] = {}
    for v in sorted(balls):
        smaller = [w for w in balls[v] if w < v]
        hits = [join[w] for w in smaller if w in join]
        if hits:
            out[v] = 1 + min(hits)
        else:
            join[v] = max((out[w] + 1 for w in smaller), default=0)
    rounds = max(list(join.values()) + list(out.values()), default=0)
    return MISResult(frozenset(join), rounds)


def solve_mis(g: Graph, backend: str = "greedy", seed: int = 0) -> MISResult:
    if backend == "greedy":
        return greedy_mis_power(g, 1)
    if backend == "localmin":
        return mis_local_min(g)
    if backend == "luby":
        return mis_luby(g, seed)
    raise ValueError(f"unknown MIS backend {backend!r}")


# -- degree+1-list-coloring ------------------------------------------------

def check_lists(g: Graph, lists: Mapping[int, Iterable[int]], slack: int = 1) -> None:
    for v in g.nodes:
        lst = lists.get(v)
        if lst is None:
            raise ListColoringError(v, "missing list")
        if len(set(lst)) < g.degree(v) + slack:
            raise ListColoringError(v, f"list size {len(set(lst))} < deg+{slack} = {g.degree(v) + slack}")


@dataclass
class MISGadget:
    graph: Graph
    pairs: Tuple[Tuple[int, int], ...]   # gadget node index -> (node, color)

    def back_map(self, mis: Iterable[int]) -> Coloring:
        col: Coloring = {}
        for x in sorted(mis):
            v, c = self.pairs[x]
            if v in col:
                raise ListColoringError(v, "two copies selected; input is not an MIS")
            col[v] = c
        return col


def d1lc_reduce_to_mis(g: Graph, lists: Mapping[int, Iterable[int]]) -> MISGadget:
    """One gadget node per (v, c); v's copies form a clique, equal colors on an edge conflict.

    Each list is cut to its deg+1 smallest colors first, which keeps
    |V'| <= n(Delta+1) and Delta' <= 2 Delta.
    """
    check_lists(g, lists)
    trimmed = {v: tuple(sorted(set(lists[v])))[: g.degree(v) + 1] for v in g.nodes}
    pairs = [(v, c) for v in g.nodes for c in trimmed[v]]
    index = {p: i for i, p in enumerate(pairs)}
    edges = []
    for v in g.nodes:
        cs = trimmed[v]
        for i in range(len(cs)):
            for j in range(i + 1, len(cs)):
                edges.append((index[(v, cs[i])], index[(v, cs[j])]))
    for u, v in g.edges():
        shared = set(trimmed[u]) & set(trimmed[v])
        for c in sorted(shared):
            edges.append((index[(u, c)], index[(v, c)]))
    return MISGadget(Graph(range(len(pairs)), edges), tuple(pairs))


def d1lc_solve(g: Graph, lists: Mapping[int, Iterable[int]], backend: str = "greedy",
               seed: int = 0) -> Tuple[Coloring, int]:
    """Proper list coloring via the MIS gadget; returns (coloring, rounds)."""
    if g.n == 0:
        return {}, 0
    gadget = d1lc_reduce_to_mis(g, lists)
    res = solve_mis(gadget.graph, backend, seed)
    col = gadget.back_map(res.nodes)
    if len(col) != g.n:
        raise ListColoringError(min(set(g.nodes) - set(col)), "no copy selected")
    return col, res.rounds


# -- layered coloring ------------------------------------------------------

def updeg(g: Graph, layer: Mapping[int, int], v: int) -> int:
    """Neighbors of v in equal or lower layers."""
    return sum(1 for w in g.neighbors(v) if w in layer and layer[w] <= layer[v])


def layered_color(
    g: Graph,
    layer: Mapping[int, int],
    lists: Mapping[int, Iterable[int]],
    backend: str = "greedy",
    seed: int = 0,
    precolored: Optional[Mapping[int, int]] = None,
) -> Tuple[Coloring, int]:
    """Color layers h, h-1, ..., 1 in turn; layer-0 nodes are left uncolored.

    A node's working list is its own list minus the colors already placed
    on its neighbors (``precolored`` included).  Each layer is then a
    degree+1-list-coloring instance provided every node keeps at least
    (uncolored same-layer neighbors + 1) colors; otherwise the offending
    node is reported.
    """
    col: Coloring = dict(precolored or {})
    rounds = 0
    h = max(layer.values(), default=0)
    for i in range(h, 0, -1):
        nodes = [v for v in g.nodes if layer.get(v) == i and v not in col]
        if not nodes:
            continue
        members = set(nodes)
        residual = {}
        for v in nodes:
            taken = {col[w] for w in g.neighbors(v) if w in col}
            res = tuple(sorted(set(lists[v]) - taken))
            need = sum(1 for w in g.neighbors(v) if w in members) + 1
            if len(res) < need:
                raise ListColoringError(
                    v, f"layer {i}: {len(res)} colors left for {need - 1} uncolored same-layer neighbors")
            residual[v] = res
        sub = induced_subgraph(g, nodes)
        part, r = d1lc_solve(sub, residual, backend, seed)
        col.update(part)
        rounds += max(r, 1)
    if precolored:
        for v in precolored:
            del col[v]
    return col, rounds


# -- color reduction -------------------------------------------------------

def verify_proper(g: Graph, coloring: Mapping[int, int], total: bool = True) -> Optional[Violation]:
    for u, v in g.edges():
        cu, cv = coloring.get(u), coloring.get(v)
        if cu is not None and cu == cv:
            return Violation("edge", f"edge {u}-{v} both colored {cu}", (u, v))
    if total:
        for v in g.nodes:
            if v not in coloring:
                return Violation("uncolored", f"node {v} uncolored", (v,))
    return None


def greedy_color_reduction(g: Graph, coloring: Mapping[int, int], marked: Iterable[int],
                           replacement: Iterable[int]) -> Coloring:
    """For each marked color in ascending order, its nodes move to the lowest free replacement color."""
    marked = sorted(set(marked))
    replacement = sorted(set(replacement))
    if set(marked) & set(replacement):
        raise ValueError("marked and replacement colors must be disjoint")
    bad = verify_proper(g, coloring)
    if bad is not None:
        raise ValueError(f"input coloring is not proper and total: {bad}")
    col = dict(coloring)
    for c in marked:
        movers = [v for v in g.nodes if col[v] == c]
        updates = {}
        for v in movers:
            around = {col[w] for w in g.neighbors(v)}
            for c2 in replacement:
                if c2 not in around:
                    updates[v] = c2
                    break
        col.update(updates)
    return col


# -- text formats ----------------------------------------------------------

def write_coloring(coloring: Mapping[int, int]) -> str:
    return "".join(f"{v} {coloring[v]}\n" for v in sorted(coloring))


def read_coloring(text: str) -> Coloring:
    col: Coloring = {}
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad coloring line: {ln!r}")
        v, c = int(parts[0]), int(parts[1])
        if v in col:
            raise ValueError(f"node {v} listed twice")
        col[v] = c
    return col


def write_lists(lists: Mapping[int, Iterable[int]]) -> str:
    return "".join(f"{v} {','.join(str(c) for c in sorted(lists[v]))}\n" for v in sorted(lists))


def read_lists(text: str) -> Lists:
    out: Lists = {}
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        v, rest = ln.split(None, 1) if " " in ln else (ln, "")
        out[int(v)] = tuple(sorted(int(c) for c in rest.split(",") if c.strip()))
    return out


def write_nodeset(nodes: Iterable[int]) -> str:
    return "".join(f"{v}\n" for v in sorted(nodes))


def read_nodeset(text: str) -> List[int]:
    return [int(ln.split()[0]) for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
