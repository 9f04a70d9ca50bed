"""Classifier portfolio: hyperparameter space, each learner's math, shared
predict contract, determinism, and the JSON serialization round-trip."""

import math

import numpy as np
import pytest
import scipy.sparse as sp

from sentigram.features import FeatureMatrix
from sentigram.learners import (
    DEFAULT_HP,
    HP_SPACE,
    KINDS,
    ConstantModel,
    MultinomialNB,
    RandomForest,
    default_hp,
    load_model,
    model_from_dict,
    model_to_dict,
    sample_hp,
    save_model,
    softmax_xent_loss_grad,
    train,
    validate_hp,
)

FP = "fingerprint-of-test-dictionary"


def separable_matrix(n_per_class=8, noise=0.05, seed=0, classes=(0, 1, 2)):
    """Linearly separable sparse data: class c loads on feature pair (2c, 2c+1)."""
    rng = np.random.default_rng(seed)
    n_features = 2 * max(classes) + 2
    rows, labels = [], []
    for c in classes:
        for _ in range(n_per_class):
            row = rng.uniform(0, noise, size=n_features)
            row[2 * c] = rng.uniform(3, 5)
            row[2 * c + 1] = rng.uniform(3, 5)
            rows.append(row)
            labels.append(c)
    X = sp.csr_matrix(np.asarray(rows))
    return FeatureMatrix(X=X, y=np.asarray(labels, dtype=np.int64), fingerprint=FP, scheme="count")


def fast_hp(kind):
    """Defaults shrunk where they only cost time."""
    hp = default_hp(kind)
    if kind == "random_forest":
        hp.update(n_trees=10, max_depth=8)
    if kind in ("logistic_regression", "linear_svm"):
        hp.update(epochs=80)
    return hp


class TestHyperparameterSpace:
    def test_default_hp_is_a_fresh_copy(self):
        hp = default_hp("multinomial_nb")
        hp["alpha"] = 99.0
        assert DEFAULT_HP["multinomial_nb"]["alpha"] == 1.0

    def test_validate_fills_missing_values(self):
        full = validate_hp("logistic_regression", {"learning_rate": 0.2})
        assert full["learning_rate"] == 0.2
        assert full["epochs"] == DEFAULT_HP["logistic_regression"]["epochs"]

    def test_validate_rejects_unknown_names(self):
        with pytest.raises(ValueError, match="unknown hyperparameters"):
            validate_hp("multinomial_nb", {"depth": 3})

    def test_validate_range_checks(self):
        with pytest.raises(ValueError, match="alpha"):
            validate_hp("multinomial_nb", {"alpha": 100.0})
        with pytest.raises(ValueError, match="epochs"):
            validate_hp("linear_svm", {"epochs": 5})
        with pytest.raises(ValueError, match="epochs"):
            validate_hp("linear_svm", {"epochs": 20.5})
        with pytest.raises(ValueError, match="batch_size"):
            validate_hp("linear_svm", {"batch_size": 7})
        with pytest.raises(ValueError, match="feature_fraction"):
            validate_hp("random_forest", {"feature_fraction": 0.3})

    def test_unknown_kind_rejected_everywhere(self):
        for fn in (default_hp, lambda k: validate_hp(k, {})):
            with pytest.raises(ValueError, match="kind"):
                fn("gradient_boost")

    def test_sample_hp_respects_declared_ranges(self):
        rng = np.random.default_rng(50)
        for kind in KINDS:
            for _ in range(100):
                hp = sample_hp(kind, rng)
                assert set(hp) == set(HP_SPACE[kind])
                validated = validate_hp(kind, hp)
                assert validated == {**hp, **validated}

    def test_sample_hp_deterministic_in_rng_state(self):
        a = sample_hp("random_forest", np.random.default_rng(7))
        b = sample_hp("random_forest", np.random.default_rng(7))
        assert a == b


class TestMultinomialNB:
    def test_matches_hand_computed_laplace_estimates(self):
        X = sp.csr_matrix(np.asarray([[2.0, 0.0], [0.0, 3.0]]))
        fm = FeatureMatrix(X=X, y=np.asarray([0, 1]), fingerprint=FP, scheme="count")
        model = train("multinomial_nb", {"alpha": 1.0}, fm)
        # class 0: counts (2, 0), total 2, 2 features, alpha 1
        expected_0 = [math.log(3 / 4), math.log(1 / 4)]
        expected_1 = [math.log(1 / 5), math.log(4 / 5)]
        np.testing.assert_allclose(model.feature_log_prob_[0], expected_0, atol=1e-9)
        np.testing.assert_allclose(model.feature_log_prob_[1], expected_1, atol=1e-9)
        np.testing.assert_allclose(model.class_log_prior_, [math.log(0.5)] * 2, atol=1e-9)

    def test_scores_are_exact_posteriors(self):
        X = sp.csr_matrix(np.asarray([[2.0, 0.0], [0.0, 3.0]]))
        fm = FeatureMatrix(X=X, y=np.asarray([0, 1]), fingerprint=FP, scheme="count")
        model = train("multinomial_nb", {"alpha": 1.0}, fm)
        probe = sp.csr_matrix(np.asarray([[1.0, 0.0]]))
        # posterior ratio for [1, 0]: p(c) * p(f0 | c)
        post = np.asarray([0.5 * 3 / 4, 0.5 * 1 / 5])
        np.testing.assert_allclose(
            model.predict_scores(probe)[0], post / post.sum(), atol=1e-12
        )
        assert model.predict(probe)[0] == 0

    def test_alpha_changes_smoothing_per_formula(self):
        X = sp.csr_matrix(np.asarray([[4.0, 1.0], [1.0, 6.0]]))
        fm = FeatureMatrix(X=X, y=np.asarray([0, 1]), fingerprint=FP, scheme="count")
        model = train("multinomial_nb", {"alpha": 0.5}, fm)
        np.testing.assert_allclose(
            model.feature_log_prob_[0],
            [math.log(4.5 / 6.0), math.log(1.5 / 6.0)],
            atol=1e-12,
        )

    def test_negative_values_are_clamped_to_zero(self):
        X_neg = sp.csr_matrix(np.asarray([[2.0, -1.0], [-0.5, 3.0]]))
        X_clamped = sp.csr_matrix(np.asarray([[2.0, 0.0], [0.0, 3.0]]))
        y = np.asarray([0, 1])
        a = train("multinomial_nb", {}, FeatureMatrix(X_neg, y, FP, "count_x_weight"))
        b = train("multinomial_nb", {}, FeatureMatrix(X_clamped, y, FP, "count_x_weight"))
        np.testing.assert_allclose(a.feature_log_prob_, b.feature_log_prob_, atol=1e-15)
        probe = sp.csr_matrix(np.asarray([[1.0, -2.0]]))
        np.testing.assert_allclose(a.predict_scores(probe), b.predict_scores(sp.csr_matrix(np.asarray([[1.0, 0.0]]))), atol=1e-15)

    def test_prior_reflects_class_imbalance(self):
        X = sp.csr_matrix(np.ones((4, 1)))
        fm = FeatureMatrix(X=X, y=np.asarray([0, 0, 0, 2]), fingerprint=FP, scheme="count")
        model = train("multinomial_nb", {}, fm)
        np.testing.assert_allclose(
            model.class_log_prior_, [math.log(0.75), math.log(0.25)], atol=1e-12
        )


class TestSoftmaxGradient:
    def _fixture(self, sparse):
        rng = np.random.default_rng(51)
        n, F, k = 12, 5, 3
        X = rng.normal(size=(n, F))
        X[rng.random((n, F)) < 0.3] = 0.0
        if sparse:
            X = sp.csr_matrix(X)
        W = rng.normal(scale=0.5, size=(k, F))
        b = rng.normal(scale=0.5, size=k)
        y = rng.integers(0, k, size=n)
        return W, b, X, y

    @pytest.mark.parametrize("sparse", [False, True])
    def test_gradient_matches_central_finite_differences(self, sparse):
        W, b, X, y = self._fixture(sparse)
        l2 = 0.01
        loss, gW, gb = softmax_xent_loss_grad(W, b, X, y, l2)
        h = 1e-6
        fd_W = np.zeros_like(W)
        for i in range(W.shape[0]):
            for j in range(W.shape[1]):
                Wp, Wm = W.copy(), W.copy()
                Wp[i, j] += h
                Wm[i, j] -= h
                lp = softmax_xent_loss_grad(Wp, b, X, y, l2)[0]
                lm = softmax_xent_loss_grad(Wm, b, X, y, l2)[0]
                fd_W[i, j] = (lp - lm) / (2 * h)
        np.testing.assert_allclose(gW, fd_W, rtol=1e-5, atol=1e-8)
        fd_b = np.zeros_like(b)
        for i in range(len(b)):
            bp, bm = b.copy(), b.copy()
            bp[i] += h
            bm[i] -= h
            fd_b[i] = (
                softmax_xent_loss_grad(W, bp, X, y, l2)[0]
                - softmax_xent_loss_grad(W, bm, X, y, l2)[0]
            ) / (2 * h)
        np.testing.assert_allclose(gb, fd_b, rtol=1e-5, atol=1e-8)

    def test_sparse_and_dense_agree_exactly_on_loss(self):
        W, b, X, y = self._fixture(sparse=False)
        loss_d, gW_d, gb_d = softmax_xent_loss_grad(W, b, X, y, 0.01)
        loss_s, gW_s, gb_s = softmax_xent_loss_grad(W, b, sp.csr_matrix(X), y, 0.01)
        assert loss_d == pytest.approx(loss_s, abs=1e-12)
        np.testing.assert_allclose(gW_d, gW_s, atol=1e-12)
        np.testing.assert_allclose(gb_d, gb_s, atol=1e-12)

    def test_zero_weights_loss_is_log_k(self):
        rng = np.random.default_rng(52)
        X = sp.csr_matrix(rng.normal(size=(9, 4)))
        y = rng.integers(0, 3, size=9)
        loss, _, _ = softmax_xent_loss_grad(np.zeros((3, 4)), np.zeros(3), X, y, 0.0)
        assert loss == pytest.approx(math.log(3), abs=1e-12)


class TestLinearTraining:
    @pytest.mark.parametrize("kind", ["logistic_regression", "linear_svm"])
    def test_loss_history_starts_at_initial_objective_and_improves(self, kind):
        fm = separable_matrix()
        model = train(kind, fast_hp(kind), fm, seed=3)
        assert len(model.loss_history_) >= 2
        assert model.loss_history_[-1] < model.loss_history_[0]
        if kind == "logistic_regression":
            assert model.loss_history_[0] == pytest.approx(math.log(3), abs=1e-12)

    def test_early_stop_before_epoch_budget_on_plateau(self):
        # all-zero features with balanced labels make W=0 a stationary point,
        # so the objective cannot move and the epoch loop must break early
        fm = FeatureMatrix(
            X=sp.csr_matrix((4, 2)),
            y=np.asarray([0, 1, 0, 1]),
            fingerprint=FP,
            scheme="count",
        )
        hp = {"learning_rate": 0.001, "epochs": 200, "batch_size": 16, "l2": 1e-7}
        model = train("logistic_regression", hp, fm, seed=0)
        assert len(model.loss_history_) - 1 < 200  # epochs actually run

    def test_svm_objective_matches_reported_history(self):
        fm = separable_matrix()
        model = train("linear_svm", fast_hp("linear_svm"), fm, seed=1)
        y_local = np.searchsorted(model.classes_, fm.y)
        assert model._objective(fm.X, y_local) == pytest.approx(
            model.loss_history_[-1], abs=1e-12
        )


class TestSharedPredictContract:
    @pytest.mark.parametrize("kind", KINDS)
    def test_reaches_full_training_accuracy_on_separable_data(self, kind):
        fm = separable_matrix()
        model = train(kind, fast_hp(kind), fm, seed=0)
        np.testing.assert_array_equal(model.predict(fm.X), fm.y)

    @pytest.mark.parametrize("kind", KINDS)
    def test_scores_are_distributions_and_argmax_equals_predict(self, kind):
        fm = separable_matrix(seed=4)
        model = train(kind, fast_hp(kind), fm, seed=0)
        scores = model.predict_scores(fm.X)
        assert scores.shape == (fm.n_documents, len(model.classes_))
        assert np.all(scores >= 0)
        np.testing.assert_allclose(scores.sum(axis=1), 1.0, atol=1e-9)
        np.testing.assert_array_equal(
            model.classes_[np.argmax(scores, axis=1)], model.predict(fm.X)
        )

    @pytest.mark.parametrize("kind", KINDS)
    def test_classes_are_the_observed_subset(self, kind):
        fm = separable_matrix(classes=(0, 2), seed=5)  # no neutral documents
        model = train(kind, fast_hp(kind), fm, seed=0)
        np.testing.assert_array_equal(model.classes_, [0, 2])
        assert set(model.predict(fm.X)) <= {0, 2}
        assert model.predict_scores(fm.X).shape[1] == 2

    @pytest.mark.parametrize("kind", KINDS)
    def test_deterministic_given_seed(self, kind):
        fm = separable_matrix(noise=1.5, seed=6)  # noisy enough to be nontrivial
        a = train(kind, fast_hp(kind), fm, seed=9)
        b = train(kind, fast_hp(kind), fm, seed=9)
        np.testing.assert_array_equal(
            a.predict_scores(fm.X), b.predict_scores(fm.X)
        )
        assert model_to_dict(a) == model_to_dict(b)

    def test_score_tie_breaks_to_lowest_label(self):
        # equal priors and identical likelihood rows: an all-zero probe ties
        X = sp.csr_matrix(np.asarray([[1.0], [1.0]]))
        fm = FeatureMatrix(X=X, y=np.asarray([0, 2]), fingerprint=FP, scheme="count")
        model = train("multinomial_nb", {}, fm)
        probe = sp.csr_matrix(np.zeros((1, 1)))
        scores = model.predict_scores(probe)
        assert scores[0, 0] == pytest.approx(scores[0, 1], abs=1e-12)
        assert model.predict(probe)[0] == 0

    def test_single_class_training_yields_constant_model(self):
        fm = separable_matrix(classes=(1,), seed=7)
        for kind in KINDS:
            model = train(kind, {}, fm, seed=0)
            assert isinstance(model, ConstantModel)
            assert model.kind == kind
            np.testing.assert_array_equal(model.predict(fm.X), np.ones(fm.n_documents))
            np.testing.assert_array_equal(model.predict_scores(fm.X), 1.0)

    def test_train_argument_validation(self):
        fm = separable_matrix()
        with pytest.raises(ValueError, match="kind"):
            train("adaboost", {}, fm)
        unlabeled = FeatureMatrix(X=fm.X, y=None, fingerprint=FP, scheme="count")
        with pytest.raises(ValueError, match="labels"):
            train("multinomial_nb", {}, unlabeled)
        empty = FeatureMatrix(
            X=sp.csr_matrix((0, 4)), y=np.empty(0, dtype=np.int64), fingerprint=FP, scheme="count"
        )
        with pytest.raises(ValueError, match="empty"):
            train("multinomial_nb", {}, empty)

    def test_fingerprint_mismatch_rejected_at_predict_time(self):
        fm = separable_matrix()
        model = train("multinomial_nb", {}, fm)
        other = FeatureMatrix(X=fm.X, y=fm.y, fingerprint="other", scheme="count")
        with pytest.raises(ValueError, match="different dictionary"):
            model.predict(other)

    def test_wrong_column_count_rejected(self):
        fm = separable_matrix()
        model = train("multinomial_nb", {}, fm)
        with pytest.raises(ValueError, match="column"):
            model.predict(sp.csr_matrix((2, 3)))


class TestRandomForest:
    def test_low_cardinality_feature_splits_exactly(self):
        # <= 33 unique values keep every candidate midpoint, so one split
        # separates the classes perfectly
        x = np.concatenate([np.arange(-15.0, 0.0), np.arange(1.0, 16.0)]).repeat(3)
        y = np.asarray([0] * 45 + [1] * 45)
        fm = FeatureMatrix(
            X=sp.csr_matrix(x[:, None]), y=y, fingerprint=FP, scheme="count"
        )
        hp = {"n_trees": 10, "max_depth": 3, "bootstrap": False, "feature_fraction": 1.0}
        model = train("random_forest", hp, fm, seed=0)
        np.testing.assert_array_equal(model.predict(fm.X), y)
        # without bootstrap every tree sees the same rows and full feature set,
        # so the consensus is unanimous
        np.testing.assert_allclose(model.predict_scores(fm.X).max(axis=1), 1.0)

    def test_high_cardinality_feature_still_informative_after_binning(self):
        # > 32 unique values trigger threshold subsampling: splits become
        # approximate near the class boundary but the column must stay useful
        rng = np.random.default_rng(53)
        x = np.concatenate([rng.uniform(-5, -1, 50), rng.uniform(1, 5, 50)])
        y = np.asarray([0] * 50 + [1] * 50)
        fm = FeatureMatrix(
            X=sp.csr_matrix(x[:, None]), y=y, fingerprint=FP, scheme="count"
        )
        hp = {"n_trees": 10, "max_depth": 3, "bootstrap": False, "feature_fraction": 1.0}
        model = train("random_forest", hp, fm, seed=0)
        assert np.mean(model.predict(fm.X) == y) >= 0.95

    def test_vote_fractions_are_tree_consensus(self):
        fm = separable_matrix(seed=8)
        hp = {"n_trees": 11, "max_depth": 8, "bootstrap": True, "feature_fraction": 1.0}
        model = train("random_forest", hp, fm, seed=2)
        scores = model.predict_scores(fm.X)
        votes = scores * 11
        np.testing.assert_allclose(votes, np.round(votes), atol=1e-9)

    def test_permutation_importance_ranks_informative_feature(self):
        rng = np.random.default_rng(54)
        n = 60
        informative = np.where(np.arange(n) < n // 2, -2.0, 2.0) + rng.normal(0, 0.1, n)
        noise = rng.normal(size=(n, 3))
        X = sp.csr_matrix(np.column_stack([noise[:, :2], informative, noise[:, 2]]))
        y = np.asarray([0] * (n // 2) + [1] * (n // 2))
        fm = FeatureMatrix(X=X, y=y, fingerprint=FP, scheme="count")
        hp = {"n_trees": 15, "max_depth": 4, "feature_fraction": 1.0, "bootstrap": True}
        model = train("random_forest", hp, fm, seed=3)
        imp = model.permutation_importance(seed=0)
        assert imp.shape == (4,)
        assert imp[2] > 0.2
        assert imp[2] > max(imp[0], imp[1], imp[3])

    def test_permutation_importance_is_cached_and_subsamples(self):
        fm = separable_matrix(seed=9)
        hp = {"n_trees": 10, "max_depth": 6, "feature_fraction": 1.0, "bootstrap": True}
        model = train("random_forest", hp, fm, seed=1)
        first = model.permutation_importance(seed=0, max_rows=8)
        assert model.permutation_importance(seed=99) is first  # cache wins

    def test_reloaded_forest_predicts_identically_but_refuses_importance(self, tmp_path):
        fm = separable_matrix(seed=10)
        model = train("random_forest", fast_hp("random_forest"), fm, seed=4)
        path = tmp_path / "forest.json"
        save_model(model, path)
        back = load_model(path)
        np.testing.assert_array_equal(
            back.predict_scores(fm.X), model.predict_scores(fm.X)
        )
        with pytest.raises(ValueError, match="reloaded"):
            back.permutation_importance()


class TestSerialization:
    @pytest.mark.parametrize("kind", KINDS)
    def test_roundtrip_preserves_scores(self, kind, tmp_path):
        fm = separable_matrix(seed=11)
        model = train(kind, fast_hp(kind), fm, seed=5)
        path = tmp_path / "model.json"
        save_model(model, path)
        back = load_model(path, expected_fingerprint=FP)
        assert back.kind == kind
        assert back.hp == model.hp
        np.testing.assert_array_equal(back.classes_, model.classes_)
        np.testing.assert_allclose(
            back.predict_scores(fm.X), model.predict_scores(fm.X), atol=1e-15
        )

    def test_constant_model_roundtrip(self, tmp_path):
        fm = separable_matrix(classes=(2,), seed=12)
        model = train("linear_svm", {}, fm)
        path = tmp_path / "const.json"
        save_model(model, path)
        back = load_model(path)
        assert isinstance(back, ConstantModel)
        np.testing.assert_array_equal(back.predict(fm.X), 2)

    def test_fingerprint_checked_on_load(self, tmp_path):
        fm = separable_matrix(seed=13)
        model = train("multinomial_nb", {}, fm)
        path = tmp_path / "model.json"
        save_model(model, path)
        with pytest.raises(ValueError, match="different dictionary"):
            load_model(path, expected_fingerprint="someone-else")

    def test_foreign_payload_rejected(self):
        with pytest.raises(ValueError, match="format"):
            model_from_dict({"format": "nonsense/9", "kind": "multinomial_nb"})


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
