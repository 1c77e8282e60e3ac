"""Bayesian estimation of graph signals with full posterior uncertainty.

Builds Gaussian priors from graph structure (smoothness or subspace
assumptions), fuses them with noisy, noise-free or partial observations in
information form, and returns posterior distributions whose covariance
resolves uncertainty by direction - including directions that are known
exactly and directions about which the data say nothing at all.
"""

from ._rng import CounterRng
from .belief import (
    GaussianBelief,
    SamplingOperator,
    SubspaceBasis,
    bandlimit_basis,
    full_observation,
    partial_observation,
    smoothness_prior,
    subspace_prior,
)
from .graph_core import (
    Graph,
    GraphFormatError,
    Spectrum,
    gft,
    grid_graph,
    igft,
    laplacian,
    load_edge_list,
    path_graph,
    quadratic_variation,
    random_geometric_graph,
    read_signal_csv,
    spectral_decomposition,
    star_graph,
)
from .inference import (
    DegradedRankWarning,
    InconsistentConstraintsError,
    InfiniteVarianceError,
    NonUniqueSolutionWarning,
    PosteriorSummary,
    SolverDivergenceError,
    directional_uncertainty,
    fuse,
    is_perfectly_reconstructible,
    node_variances,
    perfect_reconstruct,
    posterior_covariance,
    posterior_mean,
    solve_map,
    spectral_uncertainty,
)
from .sampling_eval import covariance_metric, exhaustive_select, greedy_select
from .simulate import (
    ExperimentConfig,
    ExperimentReport,
    draw_prior_signal,
    observe,
    render_report_csv,
    run_calibration,
)

__version__ = "0.1.0"

__all__ = [
    "CounterRng",
    "DegradedRankWarning",
    "ExperimentConfig",
    "ExperimentReport",
    "GaussianBelief",
    "Graph",
    "GraphFormatError",
    "InconsistentConstraintsError",
    "InfiniteVarianceError",
    "NonUniqueSolutionWarning",
    "PosteriorSummary",
    "SamplingOperator",
    "SolverDivergenceError",
    "Spectrum",
    "SubspaceBasis",
    "bandlimit_basis",
    "covariance_metric",
    "directional_uncertainty",
    "draw_prior_signal",
    "exhaustive_select",
    "full_observation",
    "fuse",
    "gft",
    "greedy_select",
    "grid_graph",
    "igft",
    "is_perfectly_reconstructible",
    "laplacian",
    "load_edge_list",
    "node_variances",
    "observe",
    "partial_observation",
    "path_graph",
    "perfect_reconstruct",
    "posterior_covariance",
    "posterior_mean",
    "quadratic_variation",
    "random_geometric_graph",
    "read_signal_csv",
    "render_report_csv",
    "run_calibration",
    "smoothness_prior",
    "solve_map",
    "spectral_decomposition",
    "spectral_uncertainty",
    "star_graph",
    "subspace_prior",
]
