"""Acceptance suite: one PASS/FAIL line per criterion, collected in the terminal summary."""

import hashlib
import math
import os
import random
import time

import pytest

from oracles import (all_maximal_independent_sets, flexible_exists_brute, hso_feasible_brute, list_colorable,
                     max_degree_within, random_dcc)

from deltacolor.clusters import DETERMINISTIC, FLEX_KIND, RANDOMIZED, SCALED_DEFAULT, Params
from deltacolor.dcc import DCC, FlexibleSubgraph, color_flexible, find_flexible_near
from deltacolor.generators import (CAGES, cage, complete_graph, cycle_graph, hypercube, random_bipartite,
                                   random_bipartite_regular, random_graph, random_regular, shuffle_ids, tree)
from deltacolor.graph import Multihypergraph, sphere, weak_diameter
from deltacolor.hso import hso_exact, randomized_threshold, verify_hso
from deltacolor.pipeline import (UnsolvableError, audit_flexibility, delta_color, delta_color_bounded_clique,
                                 dumps_report, solvability_check, verify_coloring)
from deltacolor.primitives import d1lc_reduce_to_mis, d1lc_solve, greedy_color_reduction, verify_proper

ARTIFACTS = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "artifacts")
TREE_PARAMS = Params(1, 2, 6, 1, 4, scaled=True)


def build_corpus():
    out = [(f"cage:{name}", cage(name)) for name in sorted(CAGES)]
    out += [(f"tree:2:{d}", tree(2, d)) for d in range(3, 13)]
    out += [(f"hypercube:{d}", hypercube(d)) for d in range(3, 9)]
    for i in range(20):
        d = 3 + i % 3
        out.append((f"random-bipartite:{10 + 5 * i}:{d}", random_bipartite_regular(10 + 5 * i, d, i)))
    rng = random.Random(2024)
    for i in range(165):
        d = 3 + i % 3
        n = 5000 if i < 3 else max(int(round(10 ** rng.uniform(1, 3.2))), d + 2)
        if n * d % 2:
            n += 1
        out.append((f"random-regular:{n}:{d}", random_regular(n, d, i)))
    return out


@pytest.fixture(scope="module")
def corpus_runs():
    t0 = time.time()
    runs = []
    for name, g in build_corpus():
        if solvability_check(g):
            runs.append((name, g, None, None))
            continue
        col, rep = delta_color(g, SCALED_DEFAULT)
        runs.append((name, g, col, rep))
    return runs, time.time() - t0


def test_criterion_01_corpus_soundness(corpus_runs, criterion):
    runs, elapsed = corpus_runs
    solved = [(n, g, c) for n, g, c, r in runs if c is not None]
    bad = [n for n, g, c in solved if verify_coloring(g, c, g.max_degree()) is not None]
    ok = len(runs) >= 200 and not bad and len(solved) == len(runs) and elapsed < 600
    criterion(1, ok, f"{len(solved)}/{len(runs)} graphs verified with <= Delta colors, "
                     f"{len(bad)} failures, corpus time {elapsed:.0f}s (limit 600s)")
    assert ok


def test_criterion_02_flex_path(criterion):
    cases = [("tutte-12", cage("tutte-12"), SCALED_DEFAULT)]
    cases += [(f"tree:2:{d} shuffled", shuffle_ids(tree(2, d), 1), TREE_PARAMS) for d in (12, 14)]
    details, ok = [], True
    for name, g, p in cases:
        art = {}
        col, rep = delta_color(g, p, artifacts=art)
        fs = art["flex_sets"]
        audit = audit_flexibility(g, fs, g.max_degree(), d_cap=rep["d_cap"], k_cap=p.alpha_dcc)
        good = rep["clusters"][FLEX_KIND] >= 1 and len(fs.I) >= 2 and not audit
        good = good and fs.d_measured <= rep["d_cap"] and verify_coloring(g, col, 3) is None
        ok &= good
        details.append(f"{name}: flex={rep['clusters'][FLEX_KIND]} |I|={len(fs.I)} "
                       f"d={fs.d_measured}/{rep['d_cap']} audit={'ok' if not audit else len(audit)}")
    criterion(2, ok, "; ".join(details))
    assert ok


def test_criterion_03_hso_oracle(criterion):
    rng = random.Random(3)
    mismatches = invalid = 0
    for _ in range(200):
        n = rng.randint(1, 10)
        edges = [(e, rng.sample(range(n), rng.randint(1, min(n, 4)))) for e in range(rng.randint(0, 12))]
        h = Multihypergraph(range(n), edges)
        sol = hso_exact(h)
        mismatches += sol.feasible != hso_feasible_brute(h)
        if sol.feasible and verify_hso(h, sol.orientation) is not None:
            invalid += 1
    ok = mismatches == 0 and invalid == 0
    criterion(3, ok, f"200 hypergraphs: {mismatches} verdict mismatches, {invalid} invalid orientations")
    assert ok


def test_criterion_04_hypergraph_bounds(corpus_runs, criterion):
    runs, _ = corpus_runs
    reps = [r for _, _, _, r in runs if r is not None]
    for g, p in ((cage("petersen"), DETERMINISTIC), (cage("tutte-12"), DETERMINISTIC),
                 (random_regular(300, 3, 1), DETERMINISTIC), (cage("petersen"), RANDOMIZED),
                 (shuffle_ids(tree(2, 14), 1), TREE_PARAMS), (shuffle_ids(tree(2, 14), 1),
                                                              Params(1, 8, 18, 1, 4, scaled=True)),
                 (shuffle_ids(tree(2, 16), 1), Params(5, 8, 18, 2, 13, scaled=True))):
        reps.append(delta_color(g, p)[1])
    hg = [r["hypergraph"] for r in reps if r["hypergraph"]["nodes"]]
    rank_bad = sum(not h["rank_ok"] for h in hg)
    deg_bad = sum(not h["degree_ok"] for h in hg)
    needy = sum(h["nodes"] - h["rank1_nodes"] for h in hg)
    bounds = sorted({h["degree_bound"] for h in hg})
    arith = 320 * 9 * math.log2(9)
    arith_ok = arith < 2 ** 14 and randomized_threshold(1 + 2 ** 3) == pytest.approx(arith)
    ok = rank_bad == 0 and deg_bad == 0 and arith_ok
    criterion(4, ok, f"{len(hg)} hypergraphs: {rank_bad} rank violations, {deg_bad} degree violations "
                     f"({needy} nodes without a rank-1 edge, degree bounds {bounds}); "
                     f"320*9*log2(9) = {arith:.0f} < 16384: {arith_ok}")
    assert ok


def test_criterion_05_reduction_sizes(criterion):
    rng = random.Random(5)
    size_bad = map_bad = exhaustive = 0
    for trial in range(50):
        n = rng.randint(2, 6) if trial % 2 else rng.randint(7, 30)
        g = random_graph(n, rng.uniform(0.15, 0.7), trial)
        d = g.max_degree()
        lists = {v: rng.sample(range(1, d + 4), g.degree(v) + 1) for v in g.nodes}
        gad = d1lc_reduce_to_mis(g, lists)
        if gad.graph.n > g.n * (d + 1) or gad.graph.max_degree() > 2 * d:
            size_bad += 1
        if n <= 6:
            exhaustive += 1
            for m in all_maximal_independent_sets(gad.graph):
                col = gad.back_map(m)
                if set(col) != set(g.nodes) or verify_proper(g, col) is not None or \
                        any(col[v] not in lists[v] for v in g.nodes):
                    map_bad += 1
    ok = size_bad == 0 and map_bad == 0
    criterion(5, ok, f"50 instances: {size_bad} size-bound violations; {exhaustive} exhaustive back-map "
                     f"checks with {map_bad} bad colorings")
    assert ok


def test_criterion_06_color_reduction(criterion):
    rng = random.Random(6)
    violations = checks = 0
    for trial in range(100):
        g = random_graph(rng.randint(10, 40), rng.uniform(0.1, 0.4), trial)
        d = g.max_degree()
        if d < 3:
            g = random_regular(20, 3 + trial % 3, trial)
            d = g.max_degree()
        palette = list(range(1, d + 2))
        lists = {v: rng.sample(palette, d + 1) for v in g.nodes}
        col, _ = d1lc_solve(g, lists, "luby", trial)
        for k in range(3, d + 1):
            marked = rng.sample(palette, k)
            out = greedy_color_reduction(g, col, marked, [c for c in palette if c not in marked])
            checks += 1
            held = [v for v in g.nodes if out[v] in marked]
            if max_degree_within(g, held) > k - 1 or verify_proper(g, out) is not None:
                violations += 1
    ok = violations == 0 and checks > 0
    criterion(6, ok, f"100 graphs, {checks} (graph, k) pairs: {violations} violations")
    assert ok


def test_criterion_07_bounded_clique(criterion):
    graphs = [(name, cage(name)) for name in ("petersen", "heawood", "pappus")]
    seed = 0
    while len(graphs) < 23:
        g = random_bipartite(12, 12, 0.35, seed)
        seed += 1
        if g.max_degree() >= 3:
            graphs.append((f"random-bipartite#{seed}", g))
    bad = [name for name, g in graphs
           if verify_coloring(g, delta_color_bounded_clique(g, 3)[0], g.max_degree()) is not None]
    try:
        delta_color_bounded_clique(cage("heawood"), 2)
        rejected = False
    except ValueError:
        rejected = True
    deltas = sorted({g.max_degree() for _, g in graphs})
    ok = not bad and rejected
    criterion(7, ok, f"{len(graphs)} graphs (Delta in {deltas}) via omega=3: {len(bad)} failures; "
                     f"omega=2 rejected: {rejected}")
    assert ok


def test_criterion_08_expansion(criterion):
    g = cage("tutte-12")
    worst, exact, short = math.inf, True, 0
    for v in g.nodes:
        for k in range(6):
            size = len(sphere(g, v, k))
            bound = 2 ** (k // 2)
            short += size < bound
            worst = min(worst, size / bound)
            exact &= size == (3 * 2 ** (k - 1) if k else 1)
    ok = short == 0
    criterion(8, ok, f"126 nodes x k<=5: {short} spheres below 2^floor(k/2); min ratio {worst:.1f}; "
                     f"all spheres equal 3*2^(k-1): {exact}")
    assert ok


def test_criterion_09_dcc_machinery(criterion):
    rng = random.Random(9)
    failures = 0
    for _ in range(200):
        h = random_dcc(rng)
        lists = {v: rng.sample(range(1, 9), h.degree(v)) for v in h.nodes}
        try:
            col = color_flexible(h, FlexibleSubgraph(DCC, h.nodes, int(weak_diameter(h, h.nodes))), lists)
            good = verify_proper(h, col) is None and all(col[v] in lists[v] for v in h.nodes)
        except Exception:
            good = False
        failures += not (good and list_colorable(h, lists))
    disagree = checked = 0
    for trial in range(30):
        n = rng.randint(6, 16)
        g = random_graph(n, rng.uniform(0.15, 0.35), 900 + trial)
        delta = g.max_degree()
        if delta < 3:
            continue
        for v in g.nodes:
            alpha = rng.randint(1, 3)
            checked += 1
            disagree += (find_flexible_near(g, v, alpha) is not None) != flexible_exists_brute(g, v, alpha, delta)
    ok = failures == 0 and disagree == 0
    criterion(9, ok, f"200 DCCs: {failures} coloring failures; find_flexible_near vs brute force: "
                     f"{disagree} disagreements over {checked} (graph, node) pairs, n <= 16")
    assert ok


def test_criterion_10_unsolvable(criterion):
    notes = []
    k4 = solvability_check(complete_graph(4))
    notes.append(any("(Δ+1)-clique" in p for p in k4))
    for n in (5, 7, 9):
        notes.append(any("odd cycle" in p for p in solvability_check(cycle_graph(n))))
    for n in (4, 6, 8):
        notes.append(any("Δ ≥ 3 required" in p for p in solvability_check(cycle_graph(n))))
    raised = 0
    for g in (complete_graph(4), cycle_graph(5), cycle_graph(6)):
        try:
            delta_color(g)
        except UnsolvableError:
            raised += 1
    ok = all(notes) and raised == 3
    criterion(10, ok, f"K4, odd cycles C5/C7/C9, even cycles C4/C6/C8: {sum(notes)}/7 specific diagnostics, "
                      f"{raised}/3 runs refused")
    assert ok


def test_criterion_11_determinism(corpus_runs, criterion):
    runs, _ = corpus_runs
    picks = [r for r in runs if r[2] is not None][::20][:10]
    same = 0
    for i, (name, g, _, _) in enumerate(picks):
        p = SCALED_DEFAULT if i % 2 else Params(4, 2, 6, 2, 13, mode="rand", scaled=True)
        digests = set()
        for _ in range(2):
            col, rep = delta_color(g, p, seed=i)
            blob = dumps_report(rep) + "".join(f"{v} {col[v]}\n" for v in sorted(col))
            digests.add(hashlib.sha256(blob.encode()).hexdigest())
        same += len(digests) == 1
    ok = same == len(picks) == 10
    criterion(11, ok, f"{same}/{len(picks)} repeated runs byte-identical (det and rand modes)")
    assert ok


def test_criterion_12_rounds_sweep(criterion):
    from deltacolor.report import plot_sweep, rows_to_csv, sweep

    rows = sweep([100, 1000, 10000], 3, [0], SCALED_DEFAULT)
    os.makedirs(ARTIFACTS, exist_ok=True)
    with open(os.path.join(ARTIFACTS, "sweep.csv"), "w") as fh:
        fh.write(rows_to_csv(rows))
    plot_sweep(rows, os.path.join(ARTIFACTS, "sweep.png"), "Δ=3, scaled constants")
    totals = ", ".join(f"n={r['n']}: {r['rounds_total']}" for r in rows)
    criterion(12, True, f"non-gating; rounds_total {totals}; archived in artifacts/sweep.csv and sweep.png")
