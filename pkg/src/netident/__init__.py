"""Generic identifiability of dynamical networks with partial excitation
and measurement: randomized rank tests, a decoupled-network construction,
and path-based combinatorial conditions, cross-validated against each other.
"""

from .network_model import (
    DEFAULT_POLICY,
    Edge,
    NetworkStructure,
    Realization,
    SamplingError,
    SamplingPolicy,
    parse_structure,
    random_structure,
    sample_pair,
    sample_realization,
    serialize_structure,
    structure_digest,
)
from .numeric_core import (
    closed_loop,
    determinant,
    kron,
    noise_floor,
    numerical_rank,
)
from .algebraic import (
    AnalysisConfig,
    IdentifiabilityReport,
    analyze,
    decoupled_jacobian,
    decoupled_structure,
    edge_selector,
    generic_rank_decoupled,
    generic_rank_local,
    report_to_dict,
    report_to_json,
    response_jacobian,
    unvec,
    vec,
    verify_decoupled_equivalence,
)
from .graph_analysis import (
    PathCertificate,
    max_vertex_disjoint,
    reachable,
    shortest_path,
    transfer_rank_matches_paths,
    verify_certificate,
)
from .assignations import (
    Assignation,
    ConditionVerdict,
    EnumerationCapExceeded,
    assignation_expansion_det,
    connected_bijective_condition,
    enumerate_bijective,
    enumerate_excitation_assignations,
    enumerate_measurement_assignations,
    excitation_signature,
    grouped_expansion_det,
    measurement_signature,
    one_sided_path_condition,
    signature,
    two_sided_path_condition,
    verify_signature_factorization,
)
from .harness import (
    CampaignConfig,
    CampaignResult,
    run_campaign,
    run_oracle_suites,
    write_campaign_result,
)
from .fixtures import three_node_example, triple_path_example

__version__ = "0.1.0"
