import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mossgwas import ContingencyTable, Dataset, PriorConfig
from mossgwas.loglin import GeneratingClass, fit_posterior_mode
from mossgwas.predict import (
    Classifier,
    CvReport,
    cross_validate,
    predict_proba,
    predict_response,
    roc_auc,
    stratified_folds,
)

from oracles import brute_auc


def fit_on(counts, dimens, model, alpha=1.0):
    t = ContingencyTable(tuple(range(len(dimens))), dimens, np.asarray(counts))
    return fit_posterior_mode(t, model, PriorConfig(alpha))


class TestPredict:
    def test_independent_response(self):
        # x has 3 categories, y last; P(y=1) = 0.7 independent of x
        counts = np.outer([20, 50, 30], [30, 70]).ravel(order="F")
        fit = fit_on(counts, (3, 2), GeneratingClass.main_effects((0, 1)), alpha=1e-8)
        clf = Classifier(((fit, 1.0),), response=1)
        for x in range(3):
            assert predict_response(clf, [x, 0]) == pytest.approx(0.7, abs=1e-6)

    def test_average_of_two(self):
        fa = fit_on([80, 20], (2,), GeneratingClass.main_effects((0,)), 1e-9)   # P(y=1)=0.2
        fb = fit_on([20, 80], (2,), GeneratingClass.main_effects((0,)), 1e-9)   # P(y=1)=0.8
        clf = Classifier(((fa, 0.5), (fb, 0.5)), response=0)
        assert predict_response(clf, [0]) == pytest.approx(0.5, abs=1e-6)

    def test_deterministic_table_limit(self):
        # Y = X: cells (x=0,y=0) and (x=1,y=1) only
        fit = fit_on([40, 0, 0, 60], (2, 2), GeneratingClass.saturated((0, 1)), alpha=1e-6)
        clf = Classifier(((fit, 1.0),), response=1)
        assert predict_response(clf, [1, 0]) == pytest.approx(1.0, abs=1e-6)
        assert predict_response(clf, [0, 0]) == pytest.approx(0.0, abs=1e-6)

    def test_weight_rescaling_invariant(self):
        fa = fit_on([10, 5, 3, 12], (2, 2), GeneratingClass.saturated((0, 1)))
        fb = fit_on([7, 8, 9, 6], (2, 2), GeneratingClass.main_effects((0, 1)))
        rows = np.array([[0, 0], [1, 0]])
        a = Classifier.from_log_weights([fa, fb], [-3.0, -4.0], 1)
        b = Classifier.from_log_weights([fa, fb], [997.0, 996.0], 1)
        np.testing.assert_allclose(predict_proba(a, rows), predict_proba(b, rows), atol=1e-14)

    def test_weights_validated(self):
        fa = fit_on([10, 5, 3, 12], (2, 2), GeneratingClass.saturated((0, 1)))
        with pytest.raises(ValueError):
            Classifier(((fa, 0.4),), response=1)


class TestAuc:
    def test_perfect(self):
        assert roc_auc([0.9, 0.8, 0.3], [1, 1, 0]) == 100.0

    def test_all_tied(self):
        assert roc_auc([0.4] * 6, [1, 0, 1, 0, 0, 1]) == 50.0

    def test_single_class(self):
        with pytest.raises(ValueError):
            roc_auc([0.1, 0.2], [1, 1])

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        scores = np.round(rng.random(200), 2)   # rounding forces ties
        labels = rng.integers(0, 2, 200)
        assert roc_auc(scores, labels) == brute_auc(scores.tolist(), labels.tolist())

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**31))
    def test_monotone_transform_invariant(self, seed):
        rng = np.random.default_rng(seed)
        scores = rng.integers(0, 20, 60) / 20.0
        labels = np.r_[0, 1, rng.integers(0, 2, 58)]
        base = roc_auc(scores, labels)
        assert roc_auc(np.exp(3 * scores) - 7, labels) == base
        assert roc_auc(scores ** 3, labels) == base


class TestCv:
    def test_metric_identities(self):
        rng = np.random.default_rng(1)
        scores = rng.random(100)
        labels = rng.integers(0, 2, 100)
        rep = CvReport.from_predictions(scores, labels)
        (tn, fp), (fn, tp) = rep.confusion
        assert rep.confusion.sum() == 100
        assert rep.acc == pytest.approx(100 * (tp + tn) / 100)
        assert rep.tpr == pytest.approx(100 * tp / (tp + fn))
        assert rep.fpr == pytest.approx(100 * fp / (fp + tn))

    def test_threshold_tie_goes_to_one(self):
        rep = CvReport.from_predictions([0.5, 0.2], [1, 0])
        assert rep.confusion.tolist() == [[1, 0], [0, 1]]

    def test_stratified_folds_balanced(self):
        labels = np.array([0] * 11 + [1] * 7)
        folds = stratified_folds(labels, 3, np.random.default_rng(0))
        for f in range(3):
            assert sorted([np.sum((folds == f) & (labels == c)) for c in (0, 1)]) in (
                [2, 3], [2, 4], [3, 3], [3, 4])

    def test_too_many_folds(self):
        with pytest.raises(ValueError):
            stratified_folds(np.array([0, 0, 0, 1]), 2, np.random.default_rng(0))

    def test_separable(self):
        rng = np.random.default_rng(0)
        x = rng.integers(0, 2, 200)
        d = Dataset(("x", "y"), (2, 2), np.column_stack([x, x]))
        m = GeneratingClass.saturated((0, 1))
        rep = cross_validate(d, [(m, 0.0)], PriorConfig(), k=2, rng=1)
        assert rep.acc == 100.0 and rep.auc == 100.0

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(5)
        x = rng.integers(0, 3, 300)
        y = (rng.random(300) < 0.3 + 0.15 * x).astype(int)
        d = Dataset(("x", "y"), (3, 2), np.column_stack([x, y]))
        m = GeneratingClass.saturated((0, 1))
        a = cross_validate(d, [(m, 0.0)], k=5, rng=7)
        b = cross_validate(d, [(m, 0.0)], k=5, rng=7)
        assert a.diag() == b.diag()
        np.testing.assert_array_equal(a.confusion, b.confusion)
        assert a.confusion.sum() == 300
