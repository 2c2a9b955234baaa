"""Clique factors in spectral expanders.

Certify the spectral gap of a regular graph, build absorbing structures from
bipartite templates, tile with cliques, cover leftovers by disjoint
representatives, absorb, and verify the result independently.
"""

from ._kernels import BACKEND
from .absorber import (
    AbsorbingStructure,
    BuildFailure,
    absorb,
    build_absorbing_structure,
    empirical_concentration,
    flexible_degree_check,
    verify_absorbing_structure,
)
from .cliques import (
    Spider,
    Tiling,
    enumerate_cliques_in,
    exact_factor,
    find_spider,
    greedy_descent_clique,
    greedy_tiling,
)
from .config import ConfigError, PipelineConfig
from .graph import (
    EdgeListError,
    Graph,
    common_neighborhood,
    degree_profile,
    load_edge_list,
    write_edge_list,
)
from .pipeline import FailureReport, KtFactor, kt_factor, verify_factor, verify_fractional_factor
from .sdr import CandidateFamily, ah_condition_check, build_candidate_family, solve_sdr
from .spectral import (
    SpectralCertificate,
    certify,
    degree_floor,
    eml_slack,
    estimate_bijumbledness,
    lambda_floor,
    low_degree_count,
    second_eigenvalue,
)
from .template import Template, generate_template, resilient_matching, verify_template

__version__ = "0.1.0"
