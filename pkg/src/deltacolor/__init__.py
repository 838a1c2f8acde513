"""LOCAL-model Delta-coloring toolkit: cluster partitions, hypergraph sinkless
orientation, layered list coloring, and the bounded-clique-number variant."""

from .clusters import DETERMINISTIC, RANDOMIZED, SCALED_DEFAULT, Params
from .graph import Graph, Multihypergraph, read_edgelist, write_edgelist
from .pipeline import (UnsolvableError, delta_color, delta_color_bounded_clique, solvability_check,
                       verify_coloring)

__all__ = [
    "DETERMINISTIC", "RANDOMIZED", "SCALED_DEFAULT", "Params", "Graph", "Multihypergraph",
    "read_edgelist", "write_edgelist", "UnsolvableError", "delta_color", "delta_color_bounded_clique",
    "solvability_check", "verify_coloring",
]
__version__ = "0.1.0"
