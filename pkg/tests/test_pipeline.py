import json

import pytest

from deltacolor.clusters import DCC_KIND, FLEX_KIND, SCALED_DEFAULT, Params
from deltacolor.dcc import DCC, LOW_DEGREE, FlexibleSubgraph
from deltacolor.generators import (cage, complete_graph, cycle_graph, random_bipartite, random_regular,
                                   shuffle_ids, tree)
from deltacolor.graph import Graph
from deltacolor.pipeline import (FlexibilitySets, UnsolvableError, _measure, audit_flexibility,
                                 color_with_flexibility, d_cap_for, delta_color, delta_color_bounded_clique,
                                 dumps_report, find_clique, solvability_check, verify_coloring)
from deltacolor.primitives import verify_proper


def test_solvability_examples():
    assert solvability_check(cage("petersen")) == []
    assert "(Δ+1)-clique" in solvability_check(complete_graph(4))[0]
    probs = solvability_check(cycle_graph(5))
    assert any("odd cycle" in p for p in probs) and any("<= 2" in p for p in probs)
    assert solvability_check(cycle_graph(6)) == ["max degree 2 <= 2 (Δ ≥ 3 required)"]
    # a K4 component next to a bigger-degree component is fine
    g = Graph(range(9), [(a, b) for a in range(4) for b in range(a + 1, 4)] + [(4, i) for i in range(5, 9)])
    assert solvability_check(g) == []


def test_verify_coloring_examples():
    c4 = cycle_graph(4)
    assert verify_coloring(c4, {0: 1, 1: 2, 2: 1, 3: 2}, 2) is None
    assert verify_coloring(c4, {0: 1, 1: 1, 2: 2, 3: 2}, 2).kind == "edge"
    assert verify_coloring(c4, {0: 1, 1: 3, 2: 1, 3: 2}, 2).kind == "range"


def test_layered_completion_single_low_degree_node():
    # star K1,3 with Delta=3: leaf 0 is the only flexible member
    g = Graph(range(4), [(0, 1), (1, 2), (1, 3)])
    fs = _measure(g, [FlexibleSubgraph(LOW_DEGREE, (0,), 0)], ())
    assert fs.layer == {0: 0, 1: 1, 2: 2, 3: 2} and fs.d_measured == 2
    col, _ = color_with_flexibility(g, fs, 3)
    assert verify_coloring(g, col, 3) is None


def test_layered_completion_uses_independent_pair():
    g = cage("tutte-12")
    art = {}
    col, rep = delta_color(g, artifacts=art)
    fs = art["flex_sets"]
    assert len(fs.I) >= 2 and all(col[v] == 1 for v in fs.I)
    assert verify_coloring(g, col, 3) is None


def test_audit_detects_breaches():
    g = cycle_graph(6)
    g = Graph(range(7), list(g.edges()) + [(0, 6)])  # node 0 has degree 3
    fine = _measure(g, [FlexibleSubgraph(LOW_DEGREE, (3,), 0)], ())
    assert audit_flexibility(g, fine, 3) == []
    kinds = lambda fs, **kw: {v.kind for v in audit_flexibility(g, fs, 3, **kw)}
    assert "flexible" in kinds(_measure(g, [FlexibleSubgraph(LOW_DEGREE, (0,), 0)], ()))
    assert "s-adjacent" in kinds(_measure(g, [FlexibleSubgraph(LOW_DEGREE, (3,), 0),
                                              FlexibleSubgraph(LOW_DEGREE, (4,), 0)], ()))
    assert "i-edge" in kinds(_measure(g, [FlexibleSubgraph(LOW_DEGREE, (3,), 0)], (1, 2)))
    assert "i-in-s" in kinds(_measure(g, [FlexibleSubgraph(LOW_DEGREE, (3,), 0)], (3,)))
    assert "depth" in kinds(fine, d_cap=1)
    lone = FlexibilitySets([], (), (), {v: float("inf") for v in g.nodes})
    assert "unreached" in kinds(lone)
    c5 = FlexibleSubgraph(DCC, (0, 1, 2, 3, 4), 2)
    assert "flexible" in {v.kind for v in audit_flexibility(cycle_graph(5), _measure(cycle_graph(5), [c5], ()), 3)}


@pytest.mark.parametrize("name", ["petersen", "heawood", "pappus", "tutte-coxeter", "harries-10", "tutte-12"])
def test_delta_color_cages(name):
    g = cage(name)
    col, rep = delta_color(g)
    assert verify_coloring(g, col, 3) is None
    assert rep["verified"] and rep["colors_used"] <= 3 and rep["graph"]["delta"] == 3


def test_delta_color_tutte12_uses_flex_clusters():
    col, rep = delta_color(cage("tutte-12"))
    assert rep["clusters"][FLEX_KIND] >= 1 and rep["gatherers"] >= 1
    assert rep["flex_sets"]["|I|"] >= 2


def test_delta_color_tree16():
    g = tree(2, 16)
    col, rep = delta_color(g, Params(4, 2, 10, 2, 19, scaled=True))
    assert verify_coloring(g, col, 3) is None
    col, rep = delta_color(shuffle_ids(g, 1), Params(1, 2, 6, 1, 4, scaled=True))
    assert verify_coloring(shuffle_ids(g, 1), col, 3) is None and rep["flex_sets"]["|I|"] > 0


def test_delta_color_random_regular_and_modes():
    for seed in range(3):
        for d in (3, 4, 5):
            g = random_regular(150, d, seed)
            col, rep = delta_color(g, seed=seed)
            assert verify_coloring(g, col, d) is None
    g = random_regular(200, 3, 9)
    p = Params(4, 2, 6, 2, 13, mode="rand", scaled=True)
    col, rep = delta_color(g, p, seed=3)
    assert verify_coloring(g, col, 3) is None and rep["backend"] == "luby"


def test_delta_color_paper_constants_on_petersen():
    from deltacolor.clusters import DETERMINISTIC, RANDOMIZED
    for p in (DETERMINISTIC, RANDOMIZED):
        col, rep = delta_color(cage("petersen"), p)
        assert verify_coloring(cage("petersen"), col, 3) is None and rep["paper_constants"]


def test_delta_color_rejects_unsolvable():
    with pytest.raises(UnsolvableError):
        delta_color(complete_graph(4))
    with pytest.raises(UnsolvableError):
        delta_color(cycle_graph(7))


def test_report_shape_and_determinism():
    g = random_regular(120, 3, 2)
    col, rep = delta_color(g, seed=5)
    col2, rep2 = delta_color(g, seed=5)
    assert col == col2 and dumps_report(rep) == dumps_report(rep2)
    rep = json.loads(dumps_report(rep))
    assert rep["rounds_total"] == sum(rep["rounds_by_phase"].values())
    assert {"dcc_select", "dcc_mis", "dcc_grow", "hso", "layers"} <= set(rep["rounds_by_phase"])
    assert rep["d_cap"] >= rep["flex_sets"]["d_measured"]


def test_d_cap_formula():
    gamma = {DCC_KIND: 4, FLEX_KIND: 2, "link": 3}
    assert d_cap_for(gamma, SCALED_DEFAULT) == 4 + 4 + 3 + 6 + 2


def test_find_clique():
    assert find_clique(complete_graph(5), 5) == (0, 1, 2, 3, 4)
    assert find_clique(cage("petersen"), 3) is None
    assert find_clique(cycle_graph(3), 3) == (0, 1, 2)


@pytest.mark.parametrize("name", ["petersen", "heawood", "pappus"])
def test_bounded_clique_cages(name):
    g = cage(name)
    col, rep = delta_color_bounded_clique(g, 3)
    assert verify_coloring(g, col, 3) is None and rep["reduced_max_degree"] <= 3


def test_bounded_clique_higher_degree():
    # Delta > omega: the reduction shrinks the palette before the inner run
    for seed in range(6):
        g = random_bipartite(15, 15, 0.3, seed)
        if g.max_degree() < 3:
            continue
        col, rep = delta_color_bounded_clique(g, 3, seed=seed)
        assert verify_coloring(g, col, g.max_degree()) is None
        assert rep["reduced_max_degree"] <= 3
    g = random_regular(60, 6, 1)
    assert find_clique(g, 5) is None
    col, rep = delta_color_bounded_clique(g, 4)
    assert verify_proper(g, col) is None and max(col.values()) <= 6


def test_bounded_clique_rejections():
    with pytest.raises(ValueError):
        delta_color_bounded_clique(cage("heawood"), 2)
    with pytest.raises(ValueError):
        delta_color_bounded_clique(cage("heawood"), 4)
    with pytest.raises(UnsolvableError):
        delta_color_bounded_clique(complete_graph(4), 3)
