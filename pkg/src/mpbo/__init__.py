"""Multi-policy Bayesian optimization."""

from .acquisition import Proposal, expected_improvement, sample_next
from .evaluators import CountingEvaluator, Ensemble, PolicyEvaluator
from .gp import (
    ConfigurationError,
    GPModel,
    KernelParams,
    NumericalDegeneracyError,
    ParamBox,
    SampleBuffer,
    gp_fit,
    gp_predict,
    kernel_eval,
)
from .optimizer import (
    ALGORITHMS,
    AdaptationResult,
    BudgetExhaustedError,
    MPBOState,
    TraceEntry,
    baseline_equal_split,
    baseline_random_search,
    baseline_round_robin,
    bayes_opt,
    mpbo_init,
    mpbo_run,
    mpbo_step,
    ucb_value,
)
from .rng import make_stream

__all__ = [
    "Proposal", "expected_improvement", "sample_next",
    "CountingEvaluator", "Ensemble", "PolicyEvaluator",
    "ConfigurationError", "GPModel", "KernelParams", "NumericalDegeneracyError", "ParamBox",
    "SampleBuffer", "gp_fit", "gp_predict", "kernel_eval",
    "ALGORITHMS", "AdaptationResult", "BudgetExhaustedError", "MPBOState", "TraceEntry",
    "baseline_equal_split", "baseline_random_search", "baseline_round_robin", "bayes_opt",
    "mpbo_init", "mpbo_run", "mpbo_step", "ucb_value",
    "make_stream",
]
