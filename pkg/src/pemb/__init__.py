"""Compact planar embeddings: three bit sequences plus rank/select and
parenthesis directories, built sequentially or with a fork-join pipeline."""
from .core import PembStructure, build_sequential, recover_embedding
from .errors import DisconnectedGraphError, PembError, RangeError, StructureError, ValidationError
from .parbuild import list_ranking, par_build, prefix_sum
from .parens import ParenSeq
from .rotation import (
    RotationSystem,
    SpanningTree,
    cycle,
    decorate,
    grid,
    load_pg,
    loads_pg,
    save_pg,
    dumps_pg,
    spanning_tree_dfs,
    spanning_tree_from_edges,
    spanning_tree_parallel,
    stacked_triangulation,
)
from .succinct import BitVector, SparseBitVector

__all__ = [
    "BitVector", "SparseBitVector", "ParenSeq", "RotationSystem", "SpanningTree", "PembStructure",
    "build_sequential", "par_build", "list_ranking", "prefix_sum", "recover_embedding",
    "load_pg", "loads_pg", "save_pg", "dumps_pg", "grid", "cycle", "stacked_triangulation", "decorate",
    "spanning_tree_dfs", "spanning_tree_parallel", "spanning_tree_from_edges",
    "PembError", "ValidationError", "DisconnectedGraphError", "RangeError", "StructureError",
]
