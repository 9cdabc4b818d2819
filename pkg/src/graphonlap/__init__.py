"""Graph Laplacian inference from spectral templates with graphon degree
priors: graphon sampling, consensus-filtered signals, covariance-based
template estimation, a conic recovery solver, and the experiment harness.
"""

from .errors import ConfigError, DatasetError, DegenerateInputError, InvalidFilterError
from .graphon import (
    Graphon,
    LatentDraw,
    constant,
    degree_function,
    max_decay,
    quadratic_sum,
    sample_graph,
    sample_graph_with_latents,
    step_graphon,
)
from .graphs import (
    Graph,
    LaplacianMatrix,
    Spectrum,
    empirical_degree_function,
    induced_subgraph,
    laplacian,
    perturb_adjacency,
    read_edge_list,
    recovery_error,
    spectrum,
)
from .priors import DegreePrior, spectral_distance
from .signals import (
    ConsensusFilter,
    SpectralTemplates,
    apply_filter,
    default_consensus_filter,
    estimate_templates,
    exact_covariance,
    exact_templates,
    generate_signals,
    load_matrix,
    save_matrix,
    templates_from_covariance,
    templates_from_noisy_adjacency,
)
from .solver import (
    KktReport,
    RecoveryProblem,
    RecoverySolution,
    SolverConfig,
    build_problem,
    solve,
    verify_kkt,
)

__version__ = "0.1.0"
