"""Multiway spectral graph partitioning by semi-sparse orthogonal approximation."""

from .cuts import (brute_force_min_psi_cut, cheeger_constant, cheeger_phi_bound, conductance, gamma_matrix,
                   ncut, phi_cut, psi_cut, rand_index, two_way_cheeger_check)
from .eigen import SpectralBasis, compute_lk, subspace_objective, top_k_eigenpairs
from .errors import (ConvergenceError, DegenerateDegreeError, EmptyPartError, GraphParseError,
                     KwayError, PartitionError)
from .graph import (NormalizedOperator, Partition, WeightedGraph, connected_components, degrees,
                    gen_block_model, gen_mesh, load_edge_list, load_matrix_market, normalize)
from .indicator import (IndicatorMatrix, PhiFactorization, SsoResult, cpqr_init, factorize_phi,
                        grad_q_norm, nearest_indicator, partition_graph, procrustes, sso)
from .kmeans import kmeans_rows
from .twoway import fiedler_sweep

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DegenerateDegreeError",
    "EmptyPartError",
    "GraphParseError",
    "IndicatorMatrix",
    "KwayError",
    "NormalizedOperator",
    "Partition",
    "PartitionError",
    "PhiFactorization",
    "SpectralBasis",
    "SsoResult",
    "WeightedGraph",
    "brute_force_min_psi_cut",
    "cheeger_constant",
    "cheeger_phi_bound",
    "compute_lk",
    "conductance",
    "connected_components",
    "cpqr_init",
    "degrees",
    "factorize_phi",
    "fiedler_sweep",
    "gamma_matrix",
    "gen_block_model",
    "gen_mesh",
    "grad_q_norm",
    "kmeans_rows",
    "load_edge_list",
    "load_matrix_market",
    "ncut",
    "nearest_indicator",
    "normalize",
    "partition_graph",
    "phi_cut",
    "procrustes",
    "psi_cut",
    "rand_index",
    "sso",
    "subspace_objective",
    "top_k_eigenpairs",
    "two_way_cheeger_check",
]
