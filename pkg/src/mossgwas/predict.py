"""
Model-averaged prediction of the response and k-fold cross-validation.

Each component is a fitted log-linear model over a regression's variables;
its prediction is the conditional probability of ``Y = 1`` given the
predictor codes. Components are averaged with weights proportional to the
evidence of the corresponding regression.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy.stats import rankdata

from .core import Dataset, contingency_table
from .evidence import PriorConfig, normalized_weights
from .loglin import FittedModel, GeneratingClass, fit_posterior_mode

THRESHOLD = 0.5


@dataclass(frozen=True)
class Classifier:
    components: Tuple[Tuple[FittedModel, float], ...]
    response: int

    def __post_init__(self):
        w = np.array([wt for _, wt in self.components], dtype=float)
        if not len(w) or np.any(w < 0) or not np.isclose(w.sum(), 1.0):
            raise ValueError("component weights must be non-negative and sum to 1")
        for fit, _ in self.components:
            if self.response not in fit.variables:
                raise ValueError("every component must include the response")

    @classmethod
    def from_log_weights(cls, fits: Sequence[FittedModel], log_weights, response: int):
        w = normalized_weights(log_weights)
        return cls(tuple(zip(fits, (float(x) for x in w))), response)


def _conditional(fit: FittedModel, rows: np.ndarray, response: int) -> np.ndarray:
    P = fit.prob_array()
    r = fit.variables.index(response)
    idx = [rows[:, v] if v != response else None for v in fit.variables]
    idx0 = tuple(np.zeros(len(rows), dtype=int) if i is None else i for i in idx)
    idx1 = tuple(np.ones(len(rows), dtype=int) if i is None else i for i in idx)
    p0, p1 = P[idx0], P[idx1]
    denom = p0 + p1
    assert np.all(denom > 0), "conditional undefined: zero probability in both response cells"
    return p1 / denom


def predict_proba(clf: Classifier, rows) -> np.ndarray:
    """P(Y = 1 | predictors) for each row of a code matrix (full dataset rows)."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.int64))
    out = np.zeros(rows.shape[0])
    for fit, w in clf.components:
        out += w * _conditional(fit, rows, clf.response)
    return out


def predict_response(clf: Classifier, row) -> float:
    """Model-averaged probability that the response equals 1 for one row."""
    return float(predict_proba(clf, row)[0])


def roc_auc(scores, labels) -> float:
    """
    Area under the ROC curve as a percentage.

    Computed as the Mann-Whitney statistic from mid-ranks, which equals the
    share of (case, control) pairs ranked concordantly, ties counted half.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels).astype(int)
    pos = labels == 1
    n_pos, n_neg = int(pos.sum()), int((~pos).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("roc_auc needs both classes")
    ranks = rankdata(scores)
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return 100.0 * u / (n_pos * n_neg)


@dataclass(frozen=True)
class CvReport:
    """Pooled confusion matrix (rows: phenotype, columns: decision) and metrics in percent."""

    confusion: np.ndarray
    acc: float
    tpr: float
    fpr: float
    auc: float
    scores: np.ndarray
    labels: np.ndarray

    @classmethod
    def from_predictions(cls, scores, labels, threshold: float = THRESHOLD) -> "CvReport":
        scores = np.asarray(scores, dtype=float)
        labels = np.asarray(labels).astype(int)
        decision = (scores >= threshold).astype(int)
        conf = np.zeros((2, 2), dtype=np.int64)
        np.add.at(conf, (labels, decision), 1)
        tn, fp, fn, tp = conf[0, 0], conf[0, 1], conf[1, 0], conf[1, 1]
        return cls(
            confusion=conf,
            acc=100.0 * (tp + tn) / conf.sum(),
            tpr=100.0 * tp / (tp + fn),
            fpr=100.0 * fp / (fp + tn),
            auc=roc_auc(scores, labels),
            scores=scores,
            labels=labels,
        )

    def diag(self) -> dict:
        return {"acc": float(self.acc), "tpr": float(self.tpr),
                "fpr": float(self.fpr), "auc": float(self.auc)}


def stratified_folds(labels, k: int, rng) -> np.ndarray:
    """Fold id per row; each class is shuffled and dealt round-robin."""
    labels = np.asarray(labels)
    folds = np.empty(len(labels), dtype=np.int64)
    for cls in (0, 1):
        idx = np.flatnonzero(labels == cls)
        if len(idx) < k:
            raise ValueError(f"class {cls} has {len(idx)} rows, fewer than k={k} folds")
        idx = rng.permutation(idx)
        folds[idx] = np.arange(len(idx)) % k
    return folds


def fit_classifier(
    data: Dataset,
    structure: Sequence[Tuple[GeneratingClass, float]],
    prior: PriorConfig = PriorConfig(),
) -> Classifier:
    """Fit each (model, log weight) component on ``data`` and combine them."""
    fits = []
    for model, _ in structure:
        table = contingency_table(data, model.variables)
        fits.append(fit_posterior_mode(table, model, prior))
    return Classifier.from_log_weights(fits, [lw for _, lw in structure], data.response_index)


def cross_validate(
    data: Dataset,
    structure: Sequence[Tuple[GeneratingClass, float]],
    prior: PriorConfig = PriorConfig(),
    k: int = 2,
    rng=None,
) -> CvReport:
    """
    Stratified k-fold cross-validation of the model-averaged classifier.

    ``structure`` holds (log-linear model, regression log evidence) pairs
    chosen on the full data; only the parameters are refit in each fold.
    Test predictions are pooled across folds before computing metrics.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if not structure:
        raise ValueError("no models to cross-validate")
    rng = np.random.default_rng(rng)
    y = data.response
    folds = stratified_folds(y, k, rng)
    scores = np.empty(data.n)
    for f in range(k):
        test = folds == f
        train = data.subset_rows(~test)
        if len(np.unique(train.response)) < 2:
            raise ValueError(f"training fold {f} contains a single class")
        clf = fit_classifier(train, structure, prior)
        scores[test] = predict_proba(clf, data.rows[test])
    return CvReport.from_predictions(scores, y)
