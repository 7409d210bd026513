"""Spanning cycle blow-up covers of dense graphs.

Library layout:
  core           graphs, hypergraphs, cluster families, verifiers
  inheritance    degree inheritance tests, estimates, tail bound
  blowup_search  biclique / blow-up / connection / rooted searches
  tiling         lower-regularity, matchings, almost perfect tilings
  cover          cover pipelines and the spanning cycle blow-up driver
  generators     seeded instance generators
  cli            command line entry points
"""

from .blowup_search import (
    BicliqueRequest,
    CopyCounter,
    EXACT,
    connect_clusters,
    count_copies,
    find_biclique,
    find_blowup,
    rooted_blowup,
)
from .core import (
    BALANCE_EXACT,
    BALANCE_QUASI,
    BALANCE_WITHIN,
    Blowup,
    CycleBlowupCertificate,
    FAIL,
    Graph,
    Hypergraph,
    PASS,
    SetFamily,
    UNKNOWN,
    Verdict,
    canonical_cycle,
    graph_from_text,
    graph_to_text,
    hypergraph_min_degree,
    is_complete_bipartite,
    min_degree,
    verify_blowup_hosted,
    verify_cycle_blowup,
)
from .cover import (
    ALMOST,
    AbsorbResult,
    AbsorptionError,
    CoverParams,
    CoverResult,
    PRESETS,
    PipelineFailure,
    SIMPLE,
    WoundPiece,
    absorb_singleton,
    almost_blowup_cover,
    dirac_hamilton_cycle,
    simple_blowup_cover,
    spanning_cycle_blowup,
    subdivide_and_wind,
    verify_cover,
)
from .generators import (
    CLIQUE_UNION_PLUS,
    DIRAC_EXTREMAL,
    FROM_FILE,
    GNP_REPAIRED,
    GeneratorSpec,
    KINDS,
    generate,
)
from .inheritance import (
    ABSOLUTE,
    DegreeEstimate,
    PropertySpec,
    RELATIVE,
    hypergeometric_tail_bound,
    inherits_degree,
    property_degree_estimate,
    property_membership,
)
from .tiling import (
    EXHAUSTIVE,
    IncrementStalled,
    Matching,
    RegularTuple,
    SAMPLED,
    Tiling,
    TilingParams,
    UNCERTIFIED,
    almost_perfect_tiling,
    check_lower_regular,
    find_lower_regular_tuple,
    hypergraph_perfect_matching,
    tiling_increment,
    tuple_density,
)

__all__ = [
    "ABSOLUTE",
    "ALMOST",
    "AbsorbResult",
    "AbsorptionError",
    "BALANCE_EXACT",
    "BALANCE_QUASI",
    "BALANCE_WITHIN",
    "BicliqueRequest",
    "Blowup",
    "CLIQUE_UNION_PLUS",
    "CopyCounter",
    "CoverParams",
    "CoverResult",
    "CycleBlowupCertificate",
    "DIRAC_EXTREMAL",
    "DegreeEstimate",
    "EXACT",
    "EXHAUSTIVE",
    "FAIL",
    "FROM_FILE",
    "GNP_REPAIRED",
    "GeneratorSpec",
    "Graph",
    "Hypergraph",
    "IncrementStalled",
    "KINDS",
    "Matching",
    "PASS",
    "PRESETS",
    "PipelineFailure",
    "PropertySpec",
    "RELATIVE",
    "RegularTuple",
    "SAMPLED",
    "SIMPLE",
    "SetFamily",
    "Tiling",
    "TilingParams",
    "UNCERTIFIED",
    "UNKNOWN",
    "Verdict",
    "WoundPiece",
    "absorb_singleton",
    "almost_blowup_cover",
    "almost_perfect_tiling",
    "canonical_cycle",
    "check_lower_regular",
    "connect_clusters",
    "count_copies",
    "dirac_hamilton_cycle",
    "find_biclique",
    "find_blowup",
    "find_lower_regular_tuple",
    "generate",
    "graph_from_text",
    "graph_to_text",
    "hypergeometric_tail_bound",
    "hypergraph_min_degree",
    "hypergraph_perfect_matching",
    "inherits_degree",
    "is_complete_bipartite",
    "min_degree",
    "property_degree_estimate",
    "property_membership",
    "rooted_blowup",
    "simple_blowup_cover",
    "spanning_cycle_blowup",
    "subdivide_and_wind",
    "tiling_increment",
    "tuple_density",
    "verify_blowup_hosted",
    "verify_cover",
    "verify_cycle_blowup",
]

__version__ = "0.1.0"
