"""Graph families for experiments, plus a small catalog of cubic cages."""

from __future__ import annotations

import random
from itertools import combinations
from typing import Dict, List, Optional, Sequence

from .graph import Graph, girth, relabel


class GenerationError(RuntimeError):
    pass


def path_graph(n: int) -> Graph:
    return Graph(range(n), [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 nodes")
    return Graph(range(n), [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph(range(n), combinations(range(n), 2))


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(range(a + b), [(i, a + j) for i in range(a) for j in range(b)])


def hypercube(dim: int) -> Graph:
    n = 1 << dim
    return Graph(range(n), [(v, v ^ (1 << i)) for v in range(n) for i in range(dim) if v < v ^ (1 << i)])


def tree(arity: int, depth: int) -> Graph:
    """Complete ``arity``-ary tree of the given depth, ids in heap order (root 0)."""
    n = sum(arity ** d for d in range(depth + 1))
    return Graph(range(n), [((v - 1) // arity, v) for v in range(1, n)])


def shuffle_ids(g: Graph, seed: int) -> Graph:
    ids = list(g.nodes)
    rng = random.Random(seed)
    rng.shuffle(ids)
    return relabel(g, dict(zip(g.nodes, ids)))


def _try_regular(n: int, d: int, rng: random.Random) -> Optional[set]:
    """One pass of pairing stubs, rejecting loops and multi-edges as they arise."""
    edges = set()
    stubs = [v for v in range(n) for _ in range(d)]
    while stubs:
        potential: Dict[int, int] = {}
        rng.shuffle(stubs)
        it = iter(stubs)
        for u, v in zip(it, it):
            if u > v:
                u, v = v, u
            if u != v and (u, v) not in edges:
                edges.add((u, v))
            else:
                potential[u] = potential.get(u, 0) + 1
                potential[v] = potential.get(v, 0) + 1
        if not _still_possible(edges, potential):
            return None
        stubs = [v for v, k in potential.items() for _ in range(k)]
    return edges


def _still_possible(edges: set, potential: Dict[int, int]) -> bool:
    if not potential:
        return True
    for s1 in potential:
        for s2 in potential:
            if s1 == s2:
                break
            if s1 > s2:
                s1, s2 = s2, s1
            if (s1, s2) not in edges:
                return True
    return False


def random_regular(n: int, d: int, seed: int = 0, girth_floor: Optional[int] = None,
                   max_tries: int = 2000) -> Graph:
    """Uniform-ish random d-regular simple graph (configuration model with rejection)."""
    if (n * d) % 2 or d >= n:
        raise ValueError("need n*d even and d < n")
    rng = random.Random(seed)
    for _ in range(max_tries):
        edges = _try_regular(n, d, rng)
        if edges is None:
            continue
        g = Graph(range(n), sorted(edges))
        if girth_floor is None or girth(g) >= girth_floor:
            return g
    extra = f" with girth >= {girth_floor}" if girth_floor is not None else ""
    raise GenerationError(f"no simple {d}-regular graph on {n} nodes{extra} after {max_tries} tries")


def random_bipartite(a: int, b: int, p: float, seed: int = 0, min_degree: int = 0) -> Graph:
    rng = random.Random(seed)
    edges = [(i, a + j) for i in range(a) for j in range(b) if rng.random() < p]
    g = Graph(range(a + b), edges)
    if min_degree and g.min_degree() < min_degree:
        raise GenerationError("random bipartite graph below requested minimum degree")
    return g


def random_bipartite_regular(n_side: int, d: int, seed: int = 0) -> Graph:
    """Union of d random perfect matchings between two sides; clashing pairs are repaired by swaps."""
    if d > n_side:
        raise ValueError("need d <= n_side")
    rng = random.Random(seed)
    edges: set = set()
    for _ in range(d):
        for _ in range(1000):
            perm = list(range(n_side))
            rng.shuffle(perm)
            for i in range(n_side):
                if (i, perm[i]) not in edges:
                    continue
                js = [j for j in range(n_side)
                      if (i, perm[j]) not in edges and (j, perm[i]) not in edges]
                if not js:
                    break
                j = rng.choice(js)
                perm[i], perm[j] = perm[j], perm[i]
            if all((i, perm[i]) not in edges for i in range(n_side)):
                edges.update((i, perm[i]) for i in range(n_side))
                break
        else:
            raise GenerationError("could not draw a simple regular bipartite graph")
    return Graph(range(2 * n_side), sorted((i, n_side + j) for i, j in edges))


def random_graph(n: int, p: float, seed: int = 0) -> Graph:
    rng = random.Random(seed)
    return Graph(range(n), [(u, v) for u, v in combinations(range(n), 2) if rng.random() < p])


def lcf_graph(n: int, shifts: Sequence[int], repeats: int) -> Graph:
    edges = {(i, (i + 1) % n) if i < (i + 1) % n else ((i + 1) % n, i) for i in range(n)}
    seq = list(shifts) * repeats
    for i, s in enumerate(seq):
        j = (i + s) % n
        edges.add((min(i, j), max(i, j)))
    return Graph(range(n), sorted(edges))


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(range(10), outer + spokes + inner)


CAGES = {
    "petersen": (10, 5),
    "heawood": (14, 6),
    "pappus": (18, 6),
    "tutte-coxeter": (30, 8),
    "harries-10": (70, 10),
    "tutte-12": (126, 12),
}

_LCF = {
    "heawood": (14, [5, -5], 7),
    "pappus": (18, [5, 7, -7, 7, -7, -5], 3),
    "tutte-coxeter": (30, [-13, -9, 7, -7, 9, 13], 5),
    "harries-10": (70, [-29, -19, -13, 13, 21, -27, 27, 33, -13, 13, 19, -21, -33, 29], 5),
    "tutte-12": (126, [17, 27, -13, -59, -35, 35, -11, 13, -53, 53, -27, 21, 57, 11, -21, -57, 59, -17], 7),
}


def cage(name: str) -> Graph:
    """Catalog graph, checked for size, cubicity and girth on construction."""
    if name not in CAGES:
        raise KeyError(f"unknown cage {name!r}; known: {', '.join(sorted(CAGES))}")
    if name == "petersen":
        g = petersen()
    else:
        n, shifts, reps = _LCF[name]
        g = lcf_graph(n, shifts, reps)
    n, gi = CAGES[name]
    if g.n != n or g.max_degree() != 3 or g.min_degree() != 3 or girth(g) != gi:
        raise GenerationError(f"catalog entry {name} failed its self-check")
    return g


def family(spec: str, seed: int = 0, girth_floor: Optional[int] = None) -> Graph:
    """Parse a short family spec such as 'random-regular:100:3', 'tree:2:12', 'cage:heawood'."""
    parts = spec.split(":")
    kind, args = parts[0], parts[1:]
    if kind == "random-regular":
        return random_regular(int(args[0]), int(args[1]), seed, girth_floor)
    if girth_floor is not None:
        raise ValueError("girth floor only applies to random families")
    if kind == "tree":
        return tree(int(args[0]), int(args[1]))
    if kind == "cycle":
        return cycle_graph(int(args[0]))
    if kind == "path":
        return path_graph(int(args[0]))
    if kind == "complete":
        return complete_graph(int(args[0]))
    if kind == "hypercube":
        return hypercube(int(args[0]))
    if kind == "complete-bipartite":
        return complete_bipartite(int(args[0]), int(args[1]))
    if kind == "random-bipartite":
        return random_bipartite_regular(int(args[0]), int(args[1]), seed)
    if kind == "cage":
        return cage(args[0])
    raise ValueError(f"unknown family {kind!r}")
