"""
Hierarchical log-linear models on a small contingency table.

A model is given by its generating class: an antichain of variable subsets
whose downward closure is the set of interaction terms present. Parameters
use corner coding with category 0 as the baseline, so each term ``E``
contributes one free coefficient per combination of non-zero codes on
``E``; the intercept is fixed by normalization.

With ``X`` the cell-by-coefficient indicator matrix and
``kappa(theta) = log sum_c exp(X theta)_c``, the conjugate prior has density
proportional to ``exp(<s, theta> - alpha * kappa(theta))`` where ``s`` are
the term margins of a fictive table with equal cells summing to ``alpha``.
The evidence is the ratio of the posterior and prior normalizing integrals,
each approximated by Laplace's method at its own mode.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.special import logsumexp

from .core import ContingencyTable, cell_codes
from .evidence import PriorConfig

Term = Tuple[int, ...]

GRAD_TOL = 1e-8
MAX_ITER = 100
RIDGE = 1e-6


class ConvergenceError(ArithmeticError):
    """Newton iterations failed to reach a stationary point."""


@dataclass(frozen=True)
class GeneratingClass:
    """
    Antichain of interaction terms over ``variables``.

    Generators are stored as sorted tuples, in canonical (size, lexicographic)
    order, so equal models compare and hash equal.
    """

    variables: Tuple[int, ...]
    generators: Tuple[Term, ...]

    def __post_init__(self):
        variables = tuple(int(v) for v in self.variables)
        gens = {tuple(sorted(int(v) for v in g)) for g in self.generators}
        if any(len(g) == 0 for g in gens):
            raise ValueError("generators must be non-empty")
        if any(v not in variables for g in gens for v in g):
            raise ValueError("generator uses a variable outside the model")
        gens = _maximal(gens)
        covered = {v for g in gens for v in g}
        if covered != set(variables):
            raise ValueError("every variable must appear in some generator")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "generators", _canonical(gens))

    @classmethod
    def main_effects(cls, variables: Sequence[int]) -> "GeneratingClass":
        return cls(tuple(variables), tuple((v,) for v in variables))

    @classmethod
    def saturated(cls, variables: Sequence[int]) -> "GeneratingClass":
        return cls(tuple(variables), (tuple(variables),))

    @classmethod
    def from_terms(cls, variables: Sequence[int], terms) -> "GeneratingClass":
        return cls(tuple(variables), tuple(_maximal({tuple(sorted(t)) for t in terms})))

    def terms(self) -> List[Term]:
        """Downward closure of the generators (non-empty terms only)."""
        return _canonical(_closure(self.generators))

    @property
    def is_saturated(self) -> bool:
        return self.generators == (tuple(sorted(self.variables)),)

    def formula(self, names: Sequence[str]) -> str:
        order = {v: i for i, v in enumerate(self.variables)}
        parts = []
        for g in self.generators:
            g = sorted(g, key=order.get)
            parts.append("[" + ",".join(names[v] for v in g) + "]")
        return "".join(parts)


def _closure(generators) -> set:
    out = set()
    for g in generators:
        for k in range(1, len(g) + 1):
            out.update(itertools.combinations(sorted(g), k))
    return out


def _maximal(terms) -> set:
    terms = set(terms)
    return {t for t in terms if not any(set(t) < set(u) for u in terms)}


def _canonical(terms) -> tuple:
    return tuple(sorted(terms, key=lambda t: (len(t), t)))


def dual_generators(m: GeneratingClass) -> List[Term]:
    """Minimal terms over ``m.variables`` absent from the model."""
    present = _closure(m.generators)
    vs = sorted(m.variables)
    absent = {t for k in range(1, len(vs) + 1) for t in itertools.combinations(vs, k)
              if t not in present}
    minimal = {t for t in absent if not any(set(u) < set(t) for u in absent)}
    return list(_canonical(minimal))


def model_neighborhood(m: GeneratingClass) -> List[GeneratingClass]:
    """Models reached by adding a dual generator or deleting a non-main-effect generator."""
    present = _closure(m.generators)
    out = []
    for d in dual_generators(m):
        out.append(GeneratingClass.from_terms(m.variables, present | {d}))
    for g in m.generators:
        if len(g) > 1:
            out.append(GeneratingClass.from_terms(m.variables, present - {g}))
    return out


def enumerate_models(variables: Sequence[int]) -> List[GeneratingClass]:
    """Every hierarchical model on ``variables`` that contains all main effects."""
    variables = tuple(variables)
    higher = [t for k in range(2, len(variables) + 1)
              for t in itertools.combinations(sorted(variables), k)]
    mains = {(v,) for v in variables}
    models = set()
    for r in range(len(higher) + 1):
        for chosen in itertools.combinations(higher, r):
            terms = mains | set(chosen)
            if _closure(_maximal(terms)) == terms:
                models.add(GeneratingClass.from_terms(variables, terms))
    return sorted(models, key=lambda m: (len(m.terms()), m.generators))


# ---------------------------------------------------------------------------
# Design matrix and the multinomial log-partition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Design:
    """Corner-coded indicator matrix for one model on one table layout."""

    matrix: np.ndarray            # (n_cells, n_params)
    labels: Tuple[Tuple[Term, Tuple[int, ...]], ...]   # (term, non-zero codes) per column


@lru_cache(maxsize=4096)
def _design(variables: Tuple[int, ...], dimens: Tuple[int, ...], terms: Tuple[Term, ...]) -> Design:
    codes = cell_codes(dimens)
    pos = {v: i for i, v in enumerate(variables)}
    cols = []
    labels = []
    for t in terms:
        idx = [pos[v] for v in t]
        for combo in itertools.product(*[range(1, dimens[i]) for i in idx]):
            cols.append(np.all(codes[:, idx] == np.asarray(combo), axis=1))
            labels.append((t, tuple(combo)))
    if cols:
        X = np.column_stack(cols).astype(float)
    else:
        X = np.zeros((codes.shape[0], 0))
    X.setflags(write=False)
    return Design(X, tuple(labels))


def design_matrix(table: ContingencyTable, m: GeneratingClass) -> Design:
    if set(table.variables) != set(m.variables):
        raise ValueError("table and model variables differ")
    return _design(table.variables, table.dimens, tuple(m.terms()))


def log_partition(X: np.ndarray, theta: np.ndarray) -> float:
    return float(logsumexp(X @ theta))


def cell_probabilities(X: np.ndarray, theta: np.ndarray) -> np.ndarray:
    eta = X @ theta
    p = np.exp(eta - eta.max())
    return p / p.sum()


def _objective(X, b, B, theta):
    """Value, gradient and negative Hessian of ``<b, theta> - B * kappa(theta)``."""
    eta = X @ theta
    kappa = float(logsumexp(eta))
    p = np.exp(eta - kappa)
    mean = X.T @ p
    value = float(b @ theta) - B * kappa
    grad = b - B * mean
    cov = (X.T * p) @ X - np.outer(mean, mean)
    return value, grad, B * cov, p


def _newton(X, b, B, theta0=None):
    """Maximize ``<b, theta> - B kappa(theta)``; returns (theta, value, neg_hessian, p)."""
    d = X.shape[1]
    theta = np.zeros(d) if theta0 is None else np.array(theta0, dtype=float)
    value, grad, H, p = _objective(X, b, B, theta)
    for _ in range(MAX_ITER):
        if d == 0 or np.max(np.abs(grad)) <= GRAD_TOL:
            return theta, value, H, p
        try:
            step = cho_solve(cho_factor(H), grad)
        except LinAlgError:
            step = cho_solve(cho_factor(H + RIDGE * np.eye(d)), grad)
        t = 1.0
        while True:
            cand = theta + t * step
            v2, g2, H2, p2 = _objective(X, b, B, cand)
            if v2 >= value - 1e-12 * abs(value) or t < 1e-10:
                break
            t *= 0.5
        theta, value, grad, H, p = cand, v2, g2, H2, p2
    if np.max(np.abs(grad)) <= GRAD_TOL:
        return theta, value, H, p
    raise ConvergenceError(
        f"Newton did not converge in {MAX_ITER} iterations "
        f"(gradient inf-norm {np.max(np.abs(grad)):.3g})"
    )


def laplace_log_integral(X: np.ndarray, b: np.ndarray, B: float):
    """
    Laplace approximation of ``log int exp(<b, theta> - B kappa(theta)) dtheta``.

    Returns ``(log_integral, theta_mode, cell_probs)``.
    """
    theta, value, H, p = _newton(X, b, B)
    d = X.shape[1]
    try:
        logdet = 2.0 * np.sum(np.log(np.diag(np.linalg.cholesky(H)))) if d else 0.0
    except np.linalg.LinAlgError:
        try:
            logdet = 2.0 * np.sum(np.log(np.diag(np.linalg.cholesky(H + RIDGE * np.eye(d)))))
        except np.linalg.LinAlgError:
            raise ConvergenceError("Hessian is not positive definite at the mode") from None
    return value + 0.5 * d * math.log(2 * math.pi) - 0.5 * logdet, theta, p


def _fictive_stats(X: np.ndarray, prior: PriorConfig):
    n_cells = X.shape[0]
    return X.T @ np.full(n_cells, prior.cell_count(n_cells)), prior.alpha


def log_marglik_loglinear(
    table: ContingencyTable,
    m: GeneratingClass,
    prior: PriorConfig = PriorConfig(),
) -> float:
    """Laplace-approximated log evidence ``log P(t_m | m)``."""
    return fit_posterior_mode(table, m, prior).log_evidence


@dataclass(frozen=True)
class FittedModel:
    """
    Posterior-mode fit of a hierarchical model.

    ``theta[0]`` is the intercept (log probability of the all-zero cell);
    the remaining entries follow ``labels``.
    """

    model: GeneratingClass
    variables: Tuple[int, ...]
    dimens: Tuple[int, ...]
    labels: Tuple[Tuple[Term, Tuple[int, ...]], ...]
    theta: np.ndarray
    cell_probs: np.ndarray
    log_evidence: float

    def coefficient_names(self, names: Sequence[str]) -> List[str]:
        out = ["(Intercept)"]
        for term, codes in self.labels:
            out.append(":".join(f"{names[v]}{c}" for v, c in zip(term, codes)))
        return out

    def coefficients(self, names: Sequence[str]) -> Dict[str, float]:
        return dict(zip(self.coefficient_names(names), (float(x) for x in self.theta)))

    def prob_array(self) -> np.ndarray:
        """Cell probabilities with axis ``i`` for ``variables[i]``."""
        return self.cell_probs.reshape(self.dimens, order="F")


def fit_posterior_mode(
    table: ContingencyTable,
    m: GeneratingClass,
    prior: PriorConfig = PriorConfig(),
) -> FittedModel:
    """
    Posterior mode of the corner-coded parameters and the Laplace evidence.

    The posterior is ``exp(<t + s, theta> - (n + alpha) kappa(theta))``; the
    evidence is its Laplace integral minus that of the prior.
    """
    design = design_matrix(table, m)
    X = design.matrix
    s, a = _fictive_stats(X, prior)
    t = X.T @ np.asarray(table.counts, dtype=float)
    n = float(table.total)
    log_post, theta, p = laplace_log_integral(X, t + s, n + a)
    log_prior, _, _ = laplace_log_integral(X, s, a)
    intercept = -log_partition(X, theta)
    return FittedModel(
        model=m,
        variables=table.variables,
        dimens=table.dimens,
        labels=design.labels,
        theta=np.concatenate([[intercept], theta]),
        cell_probs=p,
        log_evidence=float(log_post - log_prior),
    )


def penalized_gradient(table: ContingencyTable, m: GeneratingClass, prior: PriorConfig, theta):
    """Gradient of ``loglik(theta) + <s, theta> - alpha kappa(theta)`` (free coefficients)."""
    X = design_matrix(table, m).matrix
    s, a = _fictive_stats(X, prior)
    t = X.T @ np.asarray(table.counts, dtype=float)
    return _objective(X, t + s, table.total + a, np.asarray(theta, dtype=float))[1]


def penalized_objective(table: ContingencyTable, m: GeneratingClass, prior: PriorConfig, theta) -> float:
    X = design_matrix(table, m).matrix
    s, a = _fictive_stats(X, prior)
    t = X.T @ np.asarray(table.counts, dtype=float)
    return _objective(X, t + s, table.total + a, np.asarray(theta, dtype=float))[0]
