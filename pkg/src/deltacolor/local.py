"""Round-synchronous LOCAL-model engine.

A program supplies ``init(ctx)`` and ``step(ctx, state, inbox)``; both return
a :class:`Step`.  Messages a node puts in its outbox during round t are
delivered at round t+1, including the outbox of the step in which it halts.
A node halting in ``init`` uses 0 rounds.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Mapping, Optional, Union

from .graph import Graph, Multihypergraph, power_graph


class RoundCapExceeded(RuntimeError):
    def __init__(self, cap: int, states: Dict[int, Any], outputs: Dict[int, Any], live: list):
        super().__init__(f"round cap {cap} exceeded with {len(live)} live nodes")
        self.cap = cap
        self.states = states
        self.outputs = outputs
        self.live = live


class RandomnessForbidden(RuntimeError):
    pass


class _TrapRandom:
    """Stands in for the per-node RNG in deterministic mode."""

    def __getattr__(self, name):
        raise RandomnessForbidden(f"deterministic run attempted rng.{name}")


@dataclass
class Step:
    state: Any = None
    outbox: Dict[int, Any] = field(default_factory=dict)
    halted: bool = False
    output: Any = None


@dataclass
class NodeContext:
    id: int
    neighbors: tuple
    input: Any
    rng: Any
    n: int
    delta: int

    @property
    def degree(self) -> int:
        return len(self.neighbors)


class NodeProgram:
    def init(self, ctx: NodeContext) -> Step:
        raise NotImplementedError

    def step(self, ctx: NodeContext, state: Any, inbox: Dict[int, Any]) -> Step:
        raise NotImplementedError


@dataclass
class RunReport:
    rounds_total: int
    rounds_by_phase: Dict[str, int]
    seed: int
    n: int
    delta: int
    outputs: Dict[int, Any] = field(default_factory=dict, repr=False)
    outputs_file: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "rounds_total": self.rounds_total,
            "rounds_by_phase": dict(sorted(self.rounds_by_phase.items())),
            "seed": self.seed,
            "n": self.n,
            "delta": self.delta,
            "outputs_file": self.outputs_file,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


def node_rng(seed: int, node_id: int) -> random.Random:
    return random.Random(f"{seed}/{node_id}")


def run(
    g: Graph,
    program: NodeProgram,
    seed: int = 0,
    round_cap: int = 10_000,
    inputs: Optional[Mapping[int, Any]] = None,
    randomized: bool = False,
    phase: str = "run",
    ids: Optional[Mapping[int, int]] = None,
) -> RunReport:
    """Execute ``program`` on every node of ``g`` until all halt.

    ``ids`` optionally overrides the identifier each node sees (defaults to
    the graph's own node ids).  Programs only ever see identifiers: their
    own, their neighbors', message senders' and outbox addresses.
    Randomness is keyed by the identifier too.
    """
    if round_cap <= 0:
        raise ValueError("round_cap must be positive")
    if ids is None:
        ident: Mapping[int, int] = {v: v for v in g.nodes}
    else:
        if set(ids) != set(g.nodes):
            raise ValueError("ids must cover exactly the graph's nodes")
        if len(set(ids.values())) != len(ids):
            raise ValueError("node identifiers must be distinct")
        ident = ids
    back = {vid: v for v, vid in ident.items()}
    inputs = inputs or {}
    delta = g.max_degree()
    trap = _TrapRandom()
    ctxs = {}
    for v in g.nodes:
        vid = ident[v]
        ctxs[v] = NodeContext(
            id=vid,
            neighbors=tuple(sorted(ident[w] for w in g.neighbors(v))),
            input=inputs.get(v),
            rng=node_rng(seed, vid) if randomized else trap,
            n=g.n,
            delta=delta,
        )

    states: Dict[int, Any] = {}
    outputs: Dict[int, Any] = {}
    halted_at: Dict[int, int] = {}
    pending: Dict[int, Dict[int, Any]] = {}

    def absorb(v: int, st: Step, r: int) -> None:
        states[v] = st.state
        if st.output is not None:
            outputs[v] = st.output
        for wid, msg in st.outbox.items():
            w = back.get(wid)
            if w is None or not g.has_edge(v, w):
                raise ValueError(f"node {ident[v]} addressed non-neighbor {wid}")
            pending.setdefault(w, {})[ident[v]] = msg
        if st.halted:
            halted_at[v] = r

    for v in g.nodes:
        absorb(v, program.init(ctxs[v]), 0)

    r = 0
    live = [v for v in g.nodes if v not in halted_at]
    while live:
        r += 1
        if r > round_cap:
            raise RoundCapExceeded(round_cap, dict(states), dict(outputs), live)
        delivered, pending = pending, {}
        for v in live:
            absorb(v, program.step(ctxs[v], states[v], delivered.get(v, {})), r)
        live = [v for v in live if v not in halted_at]

    total = max(halted_at.values(), default=0)
    return RunReport(total, {phase: total}, seed, g.n, delta, outputs)


def run_on_power(g: Graph, k: int, program: NodeProgram, **kw) -> RunReport:
    """Run on G^k; each virtual round costs k real rounds."""
    if k < 1:
        raise ValueError("k must be >= 1")
    rep = run(power_graph(g, k), program, **kw)
    return _scale(rep, k, g.max_degree())


def run_on_virtual(vg: Union[Graph, Multihypergraph], dilation: int, program: NodeProgram, **kw) -> RunReport:
    """Run on a virtual topology whose edges span at most ``dilation`` real hops."""
    if dilation < 1:
        raise ValueError("dilation must be >= 1")
    topo = vg.comembership_graph() if isinstance(vg, Multihypergraph) else vg
    rep = run(topo, program, **kw)
    return _scale(rep, dilation, rep.delta)


def _scale(rep: RunReport, factor: int, delta: int) -> RunReport:
    return RunReport(
        rep.rounds_total * factor,
        {k: v * factor for k, v in rep.rounds_by_phase.items()},
        rep.seed,
        rep.n,
        delta,
        rep.outputs,
    )


class FunctionProgram(NodeProgram):
    """Adapter for quick programs written as two plain functions."""

    def __init__(self, init: Callable, step: Optional[Callable] = None):
        self._init = init
        self._step = step

    def init(self, ctx):
        return self._init(ctx)

    def step(self, ctx, state, inbox):
        return self._step(ctx, state, inbox)
