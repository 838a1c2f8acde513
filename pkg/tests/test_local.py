import json

import pytest

from deltacolor.generators import complete_graph, cycle_graph, path_graph, random_graph
from deltacolor.graph import Multihypergraph, distances_from, power_graph
from deltacolor.local import (FunctionProgram, RandomnessForbidden, RoundCapExceeded, Step, run,
                              run_on_power, run_on_virtual)
from deltacolor.primitives import LocalMinMIS, LubyMIS, verify_mis


def degree_now():
    return FunctionProgram(lambda ctx: Step(None, {}, True, ctx.degree))


def flood_from(src):
    def init(ctx):
        if ctx.id == src:
            return Step(None, {w: "tok" for w in ctx.neighbors}, True, 0)
        return Step(None)

    def step(ctx, st, inbox):
        if inbox:
            return Step(None, {w: "tok" for w in ctx.neighbors if w not in inbox}, True, "got")
        return Step(None)

    return FunctionProgram(init, step)


def test_halt_in_init_costs_zero_rounds():
    rep = run(cycle_graph(5), degree_now())
    assert rep.rounds_total == 0
    assert rep.outputs == {v: 2 for v in range(5)}


def test_flood_on_path_takes_path_length():
    rep = run(path_graph(5), flood_from(0))
    assert rep.rounds_total == 4


def test_halting_outbox_is_delivered():
    # node 0 halts in init but its token must still reach node 1
    rep = run(path_graph(2), flood_from(0))
    assert rep.outputs[1] == "got" and rep.rounds_total == 1


def test_luby_on_k4_single_winner():
    rep = run(complete_graph(4), LubyMIS(), seed=7, randomized=True)
    winners = {v for v, out in rep.outputs.items() if out}
    assert len(winners) == 1
    assert verify_mis(complete_graph(4), winners) is None


def test_deterministic_mode_traps_randomness():
    with pytest.raises(RandomnessForbidden):
        run(complete_graph(4), LubyMIS(), seed=7)


def test_round_cap_carries_partial_state():
    forever = FunctionProgram(lambda ctx: Step(0), lambda ctx, st, inbox: Step(st + 1))
    with pytest.raises(RoundCapExceeded) as exc:
        run(path_graph(3), forever, round_cap=5)
    assert exc.value.cap == 5 and sorted(exc.value.live) == [0, 1, 2]
    assert exc.value.states == {0: 5, 1: 5, 2: 5}
    with pytest.raises(ValueError):
        run(path_graph(3), forever, round_cap=0)


def test_message_to_non_neighbor_rejected():
    bad = FunctionProgram(lambda ctx: Step(None, {(ctx.id + 2) % 4: "x"}, True, None))
    with pytest.raises(ValueError):
        run(path_graph(4), bad)


def test_distinct_ids_required():
    with pytest.raises(ValueError):
        run(path_graph(2), degree_now(), ids={0: 5, 1: 5})


def test_power_accounting():
    g = random_graph(12, 0.25, 2)
    a = run(g, LocalMinMIS())
    b = run_on_power(g, 1, LocalMinMIS())
    assert a.outputs == b.outputs and a.rounds_total == b.rounds_total
    virt = run(power_graph(g, 3), LocalMinMIS())
    scaled = run_on_power(g, 3, LocalMinMIS())
    assert scaled.rounds_total == 3 * virt.rounds_total


def test_mis_on_c9_square():
    c9 = cycle_graph(9)
    rep = run_on_power(c9, 2, LocalMinMIS())
    s = sorted(v for v, out in rep.outputs.items() if out)
    for i, u in enumerate(s):
        for v in s[i + 1:]:
            assert distances_from(c9, u)[v] >= 3


@pytest.mark.parametrize("dilation", [1, 2, 5])
def test_virtual_accounting(dilation):
    h = Multihypergraph(range(5), [(0, [0, 1]), (1, [1, 2, 3]), (2, [3, 4])])
    base = run(h.comembership_graph(), flood_from(0))
    rep = run_on_virtual(h, dilation, flood_from(0))
    assert rep.rounds_total == dilation * base.rounds_total
    with pytest.raises(ValueError):
        run_on_virtual(h, 0, flood_from(0))


def test_reports_are_byte_identical():
    g = random_graph(30, 0.15, 4)
    a = run(g, LubyMIS(), seed=11, randomized=True)
    b = run(g, LubyMIS(), seed=11, randomized=True)
    assert a.dumps() == b.dumps() and a.outputs == b.outputs
    keys = set(json.loads(a.dumps()))
    assert keys == {"rounds_total", "rounds_by_phase", "seed", "n", "delta", "outputs_file"}


def test_influence_radius_bounded_by_rounds():
    # perturbing one node's id can only change outputs within rounds_used hops
    for seed in range(6):
        g = random_graph(20, 0.15, seed)
        base_ids = {v: 10 * v + 5 for v in g.nodes}
        a = run(g, LocalMinMIS(), ids=base_ids)
        for x in (0, 7, 13):
            ids = dict(base_ids)
            ids[x] = 1000 + x
            b = run(g, LocalMinMIS(), ids=ids)
            radius = max(a.rounds_total, b.rounds_total)
            dist = distances_from(g, x)
            for v in g.nodes:
                if a.outputs.get(v) != b.outputs.get(v):
                    assert dist.get(v, 10 ** 9) <= radius


def test_halted_state_frozen():
    seen = []

    def step(ctx, st, inbox):
        seen.append(ctx.id)
        return Step(st, {}, ctx.id == 1 or len(seen) > 3, None)

    prog = FunctionProgram(lambda ctx: Step(0, {}, ctx.id == 0, None), step)
    run(path_graph(3), prog)
    assert 0 not in seen
