"""
Mode oriented stochastic search over regressions ``Y | X_A``.

Each replicate keeps a list ``S`` of scored predictor sets. At every step an
unexplored member is drawn with probability proportional to its evidence,
its add/delete/replace neighbours are scored and inserted, and members
falling below ``cPrime`` (always) or ``c`` (with probability ``q``) times
the current best are discarded.
"""

from __future__ import annotations

import itertools
import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from .core import Dataset
from .evidence import PriorConfig, log_marglik_regression

Predictors = Tuple[int, ...]


@dataclass(frozen=True)
class SearchConfig:
    """Tuning constants shared by both search stages."""

    c: float = 0.1
    cPrime: float = 1e-4
    q: float = 0.1
    replicates: int = 5
    maxVars: int = 3
    confVars: Tuple[int, ...] = ()
    seed: Optional[int] = None

    def __post_init__(self):
        if not 0 < self.cPrime < self.c < 1:
            raise ValueError(f"need 0 < cPrime < c < 1, got c={self.c}, cPrime={self.cPrime}")
        if not 0 <= self.q <= 1:
            raise ValueError(f"q must be a probability, got {self.q}")
        if self.replicates < 1:
            raise ValueError("replicates must be positive")
        if self.maxVars < 2:
            raise ValueError("maxVars must be at least 2")
        object.__setattr__(self, "confVars", tuple(sorted(set(int(v) for v in self.confVars))))
        if len(self.confVars) > self.maxVars - 2:
            raise ValueError(
                f"{len(self.confVars)} confounding variables leave no room for a "
                f"free predictor with maxVars={self.maxVars}"
            )

    @property
    def max_predictors(self) -> int:
        return self.maxVars - 1


@dataclass(frozen=True)
class Regression:
    predictors: Predictors
    score: float

    def formula(self, names: Sequence[str], response: int) -> str:
        return "[{} | {}]".format(names[response], ", ".join(names[v] for v in self.predictors))


def regression_neighborhood(
    predictors: Sequence[int],
    candidates: Sequence[int],
    cfg: SearchConfig,
) -> List[Predictors]:
    """
    Add, delete and replace moves from the predictor set ``predictors``.

    ``candidates`` are the selectable columns (response excluded). Forced
    variables in ``cfg.confVars`` are never removed or swapped out, and a
    deletion never leaves fewer than one free predictor.
    """
    current = set(predictors)
    outside = [v for v in candidates if v not in current]
    free = [v for v in sorted(current) if v not in cfg.confVars]
    out = []
    if len(current) < cfg.max_predictors:
        out.extend(current | {w} for w in outside)
    if len(free) > 1:
        out.extend(current - {v} for v in free)
    for v in free:
        out.extend((current - {v}) | {w} for w in outside)
    seen = set()
    result = []
    for s in out:
        key = tuple(sorted(s))
        if key not in seen:
            seen.add(key)
            result.append(key)
    return result


class ScoreCache:
    """Thread-safe memo of regression evidence keyed by predictor set."""

    def __init__(self, data: Dataset, prior: PriorConfig):
        self.data = data
        self.prior = prior
        self._scores: Dict[Predictors, float] = {}
        self._lock = threading.Lock()

    def __call__(self, predictors: Predictors) -> float:
        score = self._scores.get(predictors)
        if score is None:
            score = log_marglik_regression(self.data, self.data.response_index, predictors, self.prior)
            with self._lock:
                self._scores.setdefault(predictors, score)
        return score

    def __len__(self):
        return len(self._scores)


def shotgun_search(start, neighbors, score, c, cPrime, q, rng):
    """
    Generic search loop over hashable models.

    ``start`` is the initial list of models, ``neighbors(m)`` returns the
    neighbourhood of ``m`` and ``score(m)`` its log evidence. Returns the
    final list as a dict ``model -> score``. A model that has been explored
    stays explored if it is dropped and later re-inserted, which bounds the
    number of iterations by the size of the model space.
    """
    S: Dict = {}
    for m in start:
        S[m] = score(m)
    explored = set()
    log_c, log_cp = math.log(c), math.log(cPrime)
    while True:
        unexplored = [m for m in S if m not in explored]
        if not unexplored:
            break
        w = np.array([S[m] for m in unexplored])
        w = np.exp(w - logsumexp(w))
        m = unexplored[rng.choice(len(unexplored), p=w / w.sum())]
        explored.add(m)
        for nb in neighbors(m):
            if nb not in S:
                S[nb] = score(nb)
        best = max(S.values())
        S = {k: v for k, v in S.items() if v >= best + log_cp}
        if rng.random() < q:
            S = {k: v for k, v in S.items() if v >= best + log_c}
    return S


def _ordered(S: Dict[Predictors, float]) -> List[Regression]:
    items = sorted(S.items(), key=lambda kv: (-kv[1], kv[0]))
    return [Regression(k, v) for k, v in items]


def _start_predictors(data: Dataset, cfg: SearchConfig, rng) -> List[int]:
    candidates = [v for v in data.predictors if v not in cfg.confVars]
    if not candidates:
        raise ValueError("no candidate predictors outside confVars")
    picks = rng.permutation(candidates)
    return [int(picks[r % len(picks)]) for r in range(cfg.replicates)]


def moss_stage1(
    data: Dataset,
    prior: PriorConfig = PriorConfig(),
    cfg: SearchConfig = SearchConfig(),
    rng=None,
    threads: Optional[int] = None,
    cache: Optional[ScoreCache] = None,
) -> List[Regression]:
    """
    Search regression space and return the retained regressions.

    Replicates run with independent random streams spawned from ``rng`` (or
    ``cfg.seed``); their final lists are merged, cut to within a factor
    ``c`` of the overall best and sorted by evidence (ties broken by the
    predictor tuple).
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    if not data.predictors:
        raise ValueError("dataset has no predictor columns")
    if cache is None:
        cache = ScoreCache(data, prior)
    candidates = data.predictors
    starts = _start_predictors(data, cfg, rng)
    streams = rng.spawn(cfg.replicates)

    def run(r):
        start = tuple(sorted(set(cfg.confVars) | {starts[r]}))
        return shotgun_search(
            [start],
            lambda m: regression_neighborhood(m, candidates, cfg),
            cache, cfg.c, cfg.cPrime, cfg.q, streams[r],
        )

    threads = threads or default_threads()
    if threads > 1 and cfg.replicates > 1:
        with ThreadPoolExecutor(max_workers=min(threads, cfg.replicates)) as ex:
            finals = list(ex.map(run, range(cfg.replicates)))
    else:
        finals = [run(r) for r in range(cfg.replicates)]

    merged: Dict[Predictors, float] = {}
    for S in finals:
        merged.update(S)
    best = max(merged.values())
    merged = {k: v for k, v in merged.items() if v >= best + math.log(cfg.c)}
    return _ordered(merged)


def exhaustive_regressions(
    data: Dataset,
    prior: PriorConfig = PriorConfig(),
    max_predictors: int = 2,
) -> List[Regression]:
    """Score every predictor set of size 1..``max_predictors``, best first."""
    S = {}
    for k in range(1, max_predictors + 1):
        for A in itertools.combinations(data.predictors, k):
            S[A] = log_marglik_regression(data, data.response_index, A, prior)
    return _ordered(S)


def posterior_inclusion_probs(results: Sequence[Regression]) -> Dict[int, float]:
    """
    Evidence-weighted share of retained regressions containing each variable.

    Returned in decreasing order of probability (ties by column index).
    """
    if not results:
        raise ValueError("no regressions to summarize")
    scores = np.array([r.score for r in results])
    w = np.exp(scores - logsumexp(scores))
    probs: Dict[int, float] = {}
    for r, wi in zip(results, w):
        for v in r.predictors:
            probs[v] = probs.get(v, 0.0) + float(wi)
    return dict(sorted(probs.items(), key=lambda kv: (-kv[1], kv[0])))


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("MOSSGWAS_THREADS", "1")))
    except ValueError:
        return 1
