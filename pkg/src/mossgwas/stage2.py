"""Search over hierarchical log-linear models for one regression's table."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from .core import ContingencyTable
from .evidence import PriorConfig
from .loglin import ConvergenceError, GeneratingClass, log_marglik_loglinear, model_neighborhood
from .stage1 import SearchConfig, shotgun_search

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelSearchResult:
    best: GeneratingClass
    score: float
    retained: List[tuple]      # (GeneratingClass, score), best first
    failed: List[GeneratingClass]


def moss_stage2(
    table: ContingencyTable,
    prior: PriorConfig = PriorConfig(),
    cfg: SearchConfig = SearchConfig(),
    rng=None,
    start: Optional[GeneratingClass] = None,
) -> ModelSearchResult:
    """
    Stochastic search for the hierarchical model with the largest evidence.

    Starts from the main-effects model. Models whose evidence cannot be
    computed are logged and excluded from the search instead of being
    scored.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    cache: Dict[GeneratingClass, float] = {}
    failed: List[GeneratingClass] = []

    def score(m):
        if m not in cache:
            try:
                cache[m] = log_marglik_loglinear(table, m, prior)
            except ConvergenceError as err:
                logger.warning("skipping model %s: %s", m.generators, err)
                failed.append(m)
                cache[m] = -math.inf
        return cache[m]

    def neighbors(m):
        return [nb for nb in model_neighborhood(m) if score(nb) > -math.inf]

    start = start or GeneratingClass.main_effects(table.variables)
    if score(start) == -math.inf:
        raise ConvergenceError(f"cannot score the starting model {start.generators}")
    S = shotgun_search([start], neighbors, score, cfg.c, cfg.cPrime, cfg.q, rng)
    retained = sorted(S.items(), key=lambda kv: (-kv[1], len(kv[0].terms()), kv[0].generators))
    best, best_score = retained[0]
    return ModelSearchResult(best, best_score, retained, failed)
