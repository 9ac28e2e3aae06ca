"""Sequential Bayesian design of population-sampling schedules.

Builds daily sampling designs for count surveys of a logistically
growing population: simulate or ingest counts, fit the Poisson
observation model by MCMC, score candidate days with classical or
Bayesian design criteria, and search designs sequentially or by
annealing.  Field campaigns run through event-sourced sessions exposed
over an HTTP API and a CLI.
"""
from .growth import (
    Dataset,
    GrowthParams,
    Observation,
    TimeGrid,
    count_at_day,
    logistic_mean,
    mean_curve,
    scenario,
    simulate_counts,
)
from .bayes import (
    MHConfig,
    PosteriorSample,
    PredictionBand,
    PriorSpec,
    effective_sample_size,
    log_likelihood,
    log_prior,
    log_target,
    mh_sample,
    posterior_summary,
    prediction_band,
)
from .criteria import (
    CandidateScoreTable,
    CovMatrix2,
    Criterion,
    a_criterion,
    bayes_utility,
    d_criterion,
    i_criterion,
    posterior_cov,
    preposterior_score,
    selection_frequencies,
)
from .optimize import (
    AnnealConfig,
    AnnealResult,
    Design,
    ReplicateBundle,
    SeqConfig,
    SequentialResult,
    SimulatedSource,
    exhaustive_minimum,
    replicate_scenario,
    sequential_design,
    simulated_annealing,
)
from .session import (
    SessionState,
    SessionStore,
    add_observation,
    create_session,
    drive_with_source,
    recommend_next,
    replay,
)
from .api import create_app

__version__ = "0.1.0"

__all__ = [
    "AnnealConfig",
    "AnnealResult",
    "CandidateScoreTable",
    "CovMatrix2",
    "Criterion",
    "Dataset",
    "Design",
    "GrowthParams",
    "MHConfig",
    "Observation",
    "PosteriorSample",
    "PredictionBand",
    "PriorSpec",
    "ReplicateBundle",
    "SeqConfig",
    "SequentialResult",
    "SessionState",
    "SessionStore",
    "SimulatedSource",
    "TimeGrid",
    "a_criterion",
    "add_observation",
    "bayes_utility",
    "count_at_day",
    "create_app",
    "create_session",
    "d_criterion",
    "drive_with_source",
    "effective_sample_size",
    "exhaustive_minimum",
    "i_criterion",
    "log_likelihood",
    "log_prior",
    "log_target",
    "logistic_mean",
    "mean_curve",
    "mh_sample",
    "posterior_cov",
    "posterior_summary",
    "prediction_band",
    "preposterior_score",
    "recommend_next",
    "replay",
    "replicate_scenario",
    "scenario",
    "selection_frequencies",
    "sequential_design",
    "simulate_counts",
    "simulated_annealing",
]
