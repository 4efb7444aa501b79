"""Centrality functions of graphons and their finite-graph approximations."""
from ._accel import backend_name
from .centrality import (
    AnalyticForm,
    CentralityFunction,
    GridFunction,
    StepFunction,
    analytic_centrality,
    fr_centrality,
    graphon_centrality,
    l2_distance,
    l2_norm,
    sbm_centrality,
    wg_reference,
)
from .convergence import (
    BoundParams,
    davis_kahan_check,
    max_degree_condition,
    order_stat_check,
    rho,
    run_convergence,
    sampled_bound,
    two_sample_robustness,
)
from .errors import ConfigError, DomainError, GraphonError, NumericError, PreconditionError
from .graph import CentralityVector, degree, eigenvector, embed_step, katz, pagerank, rescale
from .graphon import (
    AnalyticKernelGraphon,
    FiniteRankGraphon,
    Metadata,
    SBMGraphon,
    discretize_to_sbm,
    effective_matrices,
    evaluate,
    validate,
)
from .numerics import QuadratureSpec, Spectrum, general_eig_dominant, integrate, linear_solve, neumann_apply, sym_eig
from .sampling import kappa_schedule, make_latents, probability_matrix, sample_adjacency, sample_graph

__version__ = "0.1.0"
