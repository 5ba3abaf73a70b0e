"""
Exact log marginal likelihoods for saturated models and regressions.

The prior on the cell probabilities of a saturated table is a Dirichlet
whose pseudo-counts are all equal to ``alpha / n_cells``, so they form a
fictive table with grand total ``alpha``. The evidence of the observed
cell sequence is then the Dirichlet-multinomial ratio of gamma functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.special import gammaln, logsumexp

from .core import ContingencyTable, Dataset, contingency_table


@dataclass(frozen=True)
class PriorConfig:
    """Grand total ``alpha`` of the fictive table; every cell gets an equal share."""

    alpha: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    def cell_count(self, n_cells: int) -> float:
        return self.alpha / n_cells


def log_marglik_saturated(table: ContingencyTable, prior: PriorConfig = PriorConfig()) -> float:
    """
    Log evidence of a saturated log-linear model for ``table``.

    ``log G(a) - log G(a + n) + sum_c [log G(a_c + n_c) - log G(a_c)]`` with
    ``a_c = alpha / n_cells``.
    """
    counts = np.asarray(table.counts, dtype=float)
    a_c = prior.cell_count(counts.size)
    n = counts.sum()
    # empty cells contribute exactly zero
    nz = counts[counts > 0]
    return float(
        gammaln(prior.alpha) - gammaln(prior.alpha + n)
        + np.sum(gammaln(a_c + nz)) - nz.size * gammaln(a_c)
    )


def log_marglik_regression(
    data: Dataset,
    response: int,
    predictors: Iterable[int],
    prior: PriorConfig = PriorConfig(),
) -> float:
    """
    Log evidence of the regression of ``response`` on ``predictors``.

    This is the saturated evidence of the joint table over the response and
    predictors minus that of the predictor margin. An empty predictor set
    gives the evidence of the response margin alone.
    """
    predictors = sorted(set(int(v) for v in predictors))
    if response in predictors:
        raise ValueError("response cannot also be a predictor")
    joint = contingency_table(data, predictors + [response])
    value = log_marglik_saturated(joint, prior)
    if predictors:
        value -= log_marglik_saturated(joint.marginal(predictors), prior)
    return value


def normalized_weights(log_scores) -> np.ndarray:
    """Softmax of log scores, with max subtraction."""
    log_scores = np.asarray(log_scores, dtype=float)
    return np.exp(log_scores - logsumexp(log_scores))
