"""plado: approximate distance oracles for edge-weighted planar graphs.

The package implements a stack of structures for undirected planar graphs --
shortest-path separators, r-divisions, sparse covers and weak nets, a
constant-stretch oracle, additive and multiplicatively restricted oracles,
net trees with weighted level ancestors, and the final (1+eps) oracle --
plus a scale-based oracle for planar digraphs.
"""

from .graph import (
    PlanarGraph,
    ShortestPathTree,
    SpaceLedger,
    EmbeddingError,
    triangulate,
    sssp,
    exact_distance,
    distance_matrix,
    generate_planar,
    save_graph,
    load_graph,
    lca,
    path_max_edge,
    ceil_ratio,
)
from .decomposition import (
    DecompositionError,
    DegenerateWeightError,
    FundamentalCycleSeparator,
    RDivision,
    RecursiveDecomposition,
    STauDecomposition,
    shortest_path_separator,
    r_division,
    recursive_decomposition,
    s_tau_decompose,
)
from .covers import (
    ComponentSplitError,
    WellSeparateDecomposition,
    WeakNet,
    SparseCover,
    decompose,
    weak_net,
    sparse_cover,
)
from .labeling import (
    PortalSet,
    SeparatorLabeling,
    build_labeling,
)
from .conststretch import (
    CompactLookupTable,
    ConstStretchOracle,
    build_lookup_table,
    lookup_query,
    build_const_stretch,
    const_query,
    const_query_with_edge,
)
from .restricted import (
    Failed,
    PortalStructure,
    SmallSetOracle,
    AdditiveOracle,
    RestrictedOracle,
    build_d1,
    d1_query,
    build_small_set,
    build_additive,
    additive_query,
    build_restricted,
    restricted_query,
)
from .wla import (
    RootedTree,
    WLAStructure,
    build_wla,
    wla_query,
)
from .nettree import (
    NetTree,
    CompressedNetTree,
    QuasiSpreadOracle,
    SmallGraphLabeling,
    FullOracle,
    build_net_tree,
    compute_n_tau_plus,
    compress,
    build_quasi,
    quasi_query,
    quasi_query_detail,
    build_small_graph_labeling,
    build_full,
    full_query,
    full_query_detail,
)

__version__ = "0.1.0"
