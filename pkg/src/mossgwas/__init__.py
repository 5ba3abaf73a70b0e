"""Bayesian variable selection for categorical case-control data by mode oriented stochastic search."""

__version__ = "0.1.0"

from .core import ContingencyTable, DataError, Dataset, contingency_table, load_dataset, write_dataset
from .evidence import PriorConfig, log_marglik_regression, log_marglik_saturated
from .loglin import (
    ConvergenceError,
    FittedModel,
    GeneratingClass,
    dual_generators,
    enumerate_models,
    fit_posterior_mode,
    log_marglik_loglinear,
    model_neighborhood,
)
from .pipeline import NumericalFailure, RunReport, moss_gwas
from .predict import Classifier, CvReport, cross_validate, predict_proba, predict_response, roc_auc
from .simulate import SimConfig, simulate_dataset
from .stage1 import (
    Regression,
    SearchConfig,
    exhaustive_regressions,
    moss_stage1,
    posterior_inclusion_probs,
    regression_neighborhood,
)
from .stage2 import moss_stage2
from .window import moving_window, recode_data

__all__ = [
    "Classifier", "ContingencyTable", "ConvergenceError", "CvReport", "DataError", "Dataset",
    "FittedModel", "GeneratingClass", "NumericalFailure", "PriorConfig", "Regression",
    "RunReport", "SearchConfig", "SimConfig",
    "contingency_table", "cross_validate", "dual_generators", "enumerate_models",
    "exhaustive_regressions", "fit_posterior_mode", "load_dataset", "log_marglik_loglinear",
    "log_marglik_regression", "log_marglik_saturated", "model_neighborhood", "moss_gwas",
    "moss_stage1", "moss_stage2", "moving_window", "posterior_inclusion_probs",
    "predict_proba", "predict_response", "recode_data", "regression_neighborhood",
    "roc_auc", "simulate_dataset", "write_dataset",
]
