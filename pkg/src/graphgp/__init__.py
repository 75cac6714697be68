"""Gaussian process regression for vector-valued targets that live on a graph."""

from .exceptions import (
    DataError,
    DecompositionError,
    DimensionError,
    GraphError,
    GraphGPError,
    OracleCapError,
)
from .graph import (
    BandProfile,
    CustomProfile,
    Graph,
    GraphSpectrum,
    LaplacianProfile,
    SmoothingOperator,
    SpectralPenalty,
    build_laplacian,
    directed_penalty,
    check_vec_kronecker_identity,
    directed_smoothing_operator,
    eigendecompose,
    load_adjacency,
    parse_profile,
    save_adjacency,
    generative_project,
    gft,
    igft,
    make_penalty,
    make_smoothing_operator,
    smoothness,
)
from .kernels import KernelSpec, cross_kernel, kernel_eval, kernel_matrix, rbf_bandwidth_heuristic
from .model import (
    GpgModel,
    PredictiveDistribution,
    conventional_marginal_trace,
    fit,
    fit_graph,
    fit_operator,
    marginal_trace,
    mean_spectrum,
    predict,
    predict_batch,
    predict_conventional,
    predict_mean,
    predict_naive,
    predictive_trace_pair,
)
from .selection import CvConfig, CvReport, grid_search_cv, kfold_split, nmse
from .bench import METHODS, BenchmarkResult, BenchmarkSpec, run_benchmark
from .serialize import load_model, save_model
from .data import (
    Dataset,
    add_noise_snr,
    geodesic_graph,
    empirical_snr_db,
    load_dataset,
    random_geodesic_graph,
    save_dataset,
    synth_smooth_dataset,
)

__version__ = "0.1.0"
