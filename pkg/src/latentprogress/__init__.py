"""Bayesian inference for a latent process model of progress toward a
hard-to-measure target: individuals and test items live in a shared metric
space, responses follow a logistic item response model in the person-item
distance, and per-occasion rates of progress measure how far each individual
moved toward the target (the item centroid)."""

from .align import (
    Configuration,
    enforce_scale,
    procrustes_align,
    procrustes_points,
    rotation_align_points,
    scale_factor,
)
from .andersen import (
    AndersenParams,
    AndersenRate,
    AndersenSamples,
    andersen_progress,
    fit_andersen,
)
from .diagnostics import (
    PpcResult,
    PsrfResult,
    WaicResult,
    acceptance_report,
    min_ess,
    posterior_predictive,
    psrf_cutoff,
    psrf_matrix_from_samples,
    psrf_multivariate,
    waic,
)
from .engine import (
    ALL_BLOCKS,
    ChainConfig,
    PosteriorSamples,
    run_chain,
    run_chains,
)
from .errors import (
    ConvergenceError,
    DataError,
    DegenerateConfigurationError,
    DomainError,
    InsufficientSamplesError,
    NonFiniteLikelihoodError,
    SamplerOverflowError,
    UndefinedRateError,
    UnsupportedExportError,
)
from .geometry import EUCLIDEAN, POINCARE, MetricSpace, euclidean, poincare_disk
from .io import (
    RunConfig,
    dichotomize,
    load_responses,
    load_samples,
    parse_config_file,
    parse_rule,
    persist_samples,
    save_responses,
)
from .model import (
    Hyperparams,
    LatentState,
    ModelParams,
    ResponseTensor,
    bernoulli_loglik,
    cell_distances,
    distance_tables,
    eta_tensor,
    linear_predictor,
    log_likelihood,
    propagate_positions,
    rate_from_distances,
    target,
)
from .pg import pg1_mean, pg1_var, sample_pg1
from .progress import (
    ProgressClassification,
    ProgressSummary,
    classify_progress,
    export_interaction_map,
    lambda_density_export,
    lambda_summary,
    map_rows,
    summarize_progress,
)
from .simulate import (
    GroupScenario,
    StudyReport,
    default_study_config,
    generate_group_scenario,
    run_replications,
)

__version__ = "0.1.0"
