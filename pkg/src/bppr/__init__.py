"""Bayesian projection pursuit regression.

A reversible-jump MCMC sampler over sums of projected spline ridge
functions: the number of ridges, their active features, projection
directions and knots are all inferred jointly with the coefficients,
noise level and coefficient scale. Supports categorical inputs via
indicator ridges, multivariate responses via a principal-component
response basis, posterior predictive intervals, accumulated local
effects, and standard trace diagnostics.

Typical use:

    from bppr import Hyperparams, prepare_dataset, run_chain, predict

    dataset = prepare_dataset(frame, response="y")
    chain = run_chain(dataset, Hyperparams(n_mcmc=10000, n_burn=9000))
    result = predict(chain, new_frame)
"""

from .data import (
    Dataset,
    Standardization,
    apply_standardization,
    build_standardization,
    prepare_dataset,
)
from .diagnostics import (
    AleCurve,
    ale_curve,
    ale_from_draw_fn,
    effective_sample_size,
    interval_coverage,
    split_rhat,
)
from .errors import (
    BpprError,
    ChainFormatError,
    DegenerateKnots,
    DegenerateProjection,
    InputError,
    NumericError,
    SchemaError,
    SingularDesign,
)
from .model import (
    Hyperparams,
    ModelState,
    PosteriorChain,
    RidgeComponent,
    StepOutcome,
)
from .multivariate import (
    MultivariateChain,
    MultivariatePrediction,
    ResponseBasis,
    fit_multivariate,
    fit_response_basis,
    predict_multivariate,
)
from .sampler import (
    PredictionResult,
    birth_step,
    change_step,
    death_step,
    initial_state,
    mcmc_step,
    posterior_mean_draws,
    predict,
    run_chain,
)
from .serialize import (
    deserialize_chain,
    deserialize_model,
    load_model,
    save_model,
    serialize_chain,
    serialize_model,
    serialize_multivariate,
)
from .testbed import (
    SCENARIOS,
    SimulatedData,
    SimulatedFunctionalData,
    friedman,
    friedman_functional,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "AleCurve",
    "BpprError",
    "ChainFormatError",
    "Dataset",
    "DegenerateKnots",
    "DegenerateProjection",
    "Hyperparams",
    "InputError",
    "ModelState",
    "MultivariateChain",
    "MultivariatePrediction",
    "NumericError",
    "PosteriorChain",
    "PredictionResult",
    "ResponseBasis",
    "RidgeComponent",
    "SCENARIOS",
    "SchemaError",
    "SimulatedData",
    "SimulatedFunctionalData",
    "SingularDesign",
    "Standardization",
    "StepOutcome",
    "ale_curve",
    "ale_from_draw_fn",
    "apply_standardization",
    "birth_step",
    "build_standardization",
    "change_step",
    "death_step",
    "deserialize_chain",
    "deserialize_model",
    "effective_sample_size",
    "fit_multivariate",
    "fit_response_basis",
    "friedman",
    "friedman_functional",
    "initial_state",
    "interval_coverage",
    "load_model",
    "mcmc_step",
    "posterior_mean_draws",
    "predict",
    "predict_multivariate",
    "prepare_dataset",
    "run_chain",
    "save_model",
    "serialize_chain",
    "serialize_model",
    "serialize_multivariate",
    "simulate",
    "split_rhat",
    "__version__",
]
