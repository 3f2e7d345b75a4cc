import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from altsent.models import (
    CLASSIFIERS,
    DEFAULT_GRIDS,
    KNN,
    DecisionTree,
    GaussianNB,
    LinearRegression,
    LogisticRegression,
    ModelFormatError,
    ModelSpec,
    NotFittedError,
    RandomForest,
    SplitSpec,
    expand_grid,
    feature_importances,
    fit,
    from_document,
    grid_search,
    kfold,
    load_model,
    make_model,
    predict,
    save_model,
    split_train_test,
    stratified_kfold,
    to_document,
    train_test_indices,
    zscore_apply,
    zscore_fit,
)

import cart_oracle


def blobs(n=60, seed=0, p=3, k=2):
    rng = np.random.default_rng(seed)
    y = np.array([f"c{i % k}" for i in range(n)])
    X = rng.normal(size=(n, p)) + np.array([int(v[1:]) * 3.0 for v in y])[:, None]
    return X, y


# ---------------------------------------------------------------- scaling

def test_zscore_hand_values():
    params = zscore_fit(np.array([[1.0], [2.0], [3.0]]))
    assert params.mean[0] == 2.0
    assert params.std[0] == pytest.approx(math.sqrt(2 / 3))
    out = zscore_apply(np.array([[1.0], [2.0], [3.0]]), params)
    np.testing.assert_allclose(out.ravel(), [-1.2247, 0.0, 1.2247], atol=1e-4)


@settings(deadline=None)
@given(st.integers(2, 40), st.integers(1, 5), st.integers(0, 2**31))
def test_zscore_standardizes(n, p, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(loc=rng.uniform(-1e3, 1e3, p), scale=rng.uniform(1e-2, 1e2, p), size=(n, p))
    X[:, 0] = 7.25  # constant column
    Z = zscore_apply(X, zscore_fit(X))
    assert (Z[:, 0] == 0).all()
    if n > 1 and p > 1:
        assert np.abs(Z[:, 1:].mean(axis=0)).max() < 1e-9
        assert np.abs(Z[:, 1:].std(axis=0) - 1).max() < 1e-9


def test_zscore_column_mismatch():
    with pytest.raises(ValueError):
        zscore_apply(np.ones((2, 3)), zscore_fit(np.ones((2, 2))))


# ---------------------------------------------------------------- splitting

def test_split_sizes():
    (Xtr, ytr), (Xte, yte) = split_train_test(np.arange(10.0)[:, None], np.arange(10) % 2)
    assert len(ytr) == 8 and len(yte) == 2


def test_stratified_split_counts_and_determinism():
    y = np.array([0] * 10 + [1] * 10)
    tr, te = train_test_indices(y, SplitSpec(0.8, seed=5))
    assert np.bincount(y[tr]).tolist() == [8, 8]
    tr2, te2 = train_test_indices(y, SplitSpec(0.8, seed=5))
    assert tr.tolist() == tr2.tolist() and te.tolist() == te2.tolist()


def test_stratified_split_rejects_singleton_class():
    with pytest.raises(ValueError, match="'b'"):
        train_test_indices(np.array(["a", "a", "a", "b"]), SplitSpec())


@given(st.lists(st.sampled_from("abc"), min_size=4, max_size=80), st.floats(0.1, 0.9), st.integers(0, 99))
def test_stratified_split_partition(labels, frac, seed):
    y = np.array(labels)
    classes, counts = np.unique(y, return_counts=True)
    if counts.min() < 2:
        return
    tr, te = train_test_indices(y, SplitSpec(frac, seed))
    assert sorted(tr.tolist() + te.tolist()) == list(range(len(y)))
    share = len(tr) / len(y)
    for c, n_c in zip(classes, counts):
        taken = (y[tr] == c).sum()
        # every class keeps one row on each side, which may cost proportionality
        assert abs(taken - share * n_c) < 1 or taken in (1, n_c - 1)


def test_kfold_examples():
    y = np.array([0, 1] * 5)
    # leave-one-out on balanced data: every class is smaller than k
    with pytest.warns(UserWarning, match="fewer than k"):
        assert [len(f) for f in stratified_kfold(y, 10)] == [1] * 10
    y = np.array([0] * 60 + [1] * 40)
    folds = stratified_kfold(y, 10, seed=3)
    assert [np.bincount(y[f]).tolist() for f in folds] == [[6, 4]] * 10
    assert [len(f) for f in stratified_kfold(np.arange(100) % 3, 10)] == [10] * 10
    with pytest.raises(ValueError):
        stratified_kfold(y, 1)
    with pytest.raises(ValueError):
        stratified_kfold(np.array([0, 1]), 3)


@given(st.lists(st.sampled_from("abc"), min_size=2, max_size=60), st.data())
def test_kfold_partition_and_balance(labels, data):
    y = np.array(labels)
    k = data.draw(st.integers(2, len(y)))
    with pytest.warns(UserWarning) if np.unique(y, return_counts=True)[1].min() < k else _nothing():
        folds = stratified_kfold(y, k, seed=data.draw(st.integers(0, 50)))
    assert sorted(np.concatenate(folds).tolist()) == list(range(len(y)))
    for c in set(labels):
        n_c = labels.count(c)
        for f in folds:
            assert abs((y[f] == c).sum() - n_c / k) < 1 + 1e-9
    plain = kfold(len(y), k, 1)
    assert sorted(np.concatenate(plain).tolist()) == list(range(len(y)))


class _nothing:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


# ---------------------------------------------------------------- grid search

def test_grid_search_single_point_and_table():
    X, y = blobs()
    folds = stratified_kfold(y, 5)
    res = grid_search(lambda p: KNN(**p), {"k": [3]}, X, y, folds)
    assert res.best_params == {"k": 3} and len(res.table) == 1
    res = grid_search(lambda p: DecisionTree(**p), DEFAULT_GRIDS["decision_tree"], X, y, folds)
    assert len(res.table) == 8
    assert [row["params"] for row in res.table] == expand_grid(DEFAULT_GRIDS["decision_tree"])
    with pytest.raises(ValueError):
        grid_search(lambda p: KNN(**p), {}, X, y, folds)


def test_grid_search_prefers_deep_tree_on_xor():
    rng = np.random.default_rng(2)
    X = rng.uniform(-1, 1, size=(200, 2))
    y = np.where((X[:, 0] > 0) ^ (X[:, 1] > 0), "odd", "even")
    res = grid_search(lambda p: DecisionTree(**p), {"max_depth": [1, 8]}, X, y, stratified_kfold(y, 5))
    scores = [row["mean_score"] for row in res.table]
    assert scores[1] > scores[0]
    assert res.best_params == {"max_depth": 8}


def test_grid_search_ties_keep_earliest_and_workers_agree():
    X, y = blobs(40, seed=4)
    folds = stratified_kfold(y, 4)
    a = grid_search(lambda p: KNN(**p), {"k": [1, 1, 3]}, X, y, folds)
    b = grid_search(lambda p: KNN(**p), {"k": [1, 1, 3]}, X, y, folds, workers=3)
    assert a.table == b.table
    assert a.table[0]["mean_score"] == a.table[1]["mean_score"]
    if a.best_params["k"] == 1:
        assert a.best_score == a.table[0]["mean_score"]


# ---------------------------------------------------------------- families

@pytest.mark.parametrize("family", CLASSIFIERS)
def test_single_class_training(family):
    X = np.random.default_rng(0).normal(size=(12, 3))
    model = fit(ModelSpec(family, {"k": 3} if family == "knn" else {}), X, ["Positive"] * 12)
    assert set(predict(model, X + 5).tolist()) == {"Positive"}


def test_knn_k1_recovers_training_labels():
    X, y = blobs(30, seed=1)
    assert (KNN(k=1).fit(X, y).predict(X) == y).all()


def test_knn_distance_ties_use_lower_row():
    X = np.array([[-1.0], [1.0]])
    assert KNN(k=1).fit(X, ["left", "right"]).predict([[0.0]]).tolist() == ["left"]


def test_linear_regression_affine():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(30, 2))
    y = 2 * X[:, 0] - X[:, 1] + 3
    m = LinearRegression().fit(X, y)
    np.testing.assert_allclose(m.coef_, [2, -1], atol=1e-8)
    assert abs(m.intercept_ - 3) < 1e-8


def test_linear_regression_singular_falls_back_to_ridge():
    X = np.column_stack([np.arange(6.0), np.arange(6.0)])
    m = LinearRegression().fit(X, 2 * np.arange(6.0))
    np.testing.assert_allclose(m.predict(X), 2 * np.arange(6.0), atol=1e-6)


def test_logistic_regression_reaches_stationary_point():
    X, y = blobs(80, seed=6, p=2)
    m = LogisticRegression(C=1.0).fit(X, y)
    # gradient of 0.5*|w|^2 + C * sum log-loss, checked independently
    t = (y == m.classes_[1]).astype(float)
    w, b = m.coef_.ravel(), float(np.ravel(m.intercept_)[0])
    p = 1 / (1 + np.exp(-(X @ w + b)))
    grad_w = w + X.T @ (p - t)
    grad_b = np.sum(p - t)
    assert np.abs(grad_w).max() < 1e-4 and abs(grad_b) < 1e-4
    assert (m.predict(X) == y).mean() > 0.95


def test_logistic_one_vs_rest():
    X, y = blobs(90, seed=2, k=3)
    m = LogisticRegression().fit(X, y)
    assert m.coef_.shape == (3, X.shape[1])
    assert (m.predict(X) == y).mean() > 0.9


def test_gaussian_nb_matches_hand_likelihood():
    X, y = blobs(40, seed=8, p=2)
    m = GaussianNB().fit(X, y)
    q = np.array([[1.0, 2.0], [4.0, 2.5]])
    eps = 1e-9 * X.var(axis=0).max()
    scores = []
    for c in ("c0", "c1"):
        Xc = X[y == c]
        mu, var = Xc.mean(axis=0), Xc.var(axis=0) + eps
        ll = -0.5 * np.sum(np.log(2 * np.pi * var) + (q - mu) ** 2 / var, axis=1)
        scores.append(ll + np.log(len(Xc) / len(X)))
    expected = np.array(["c0", "c1"])[np.argmax(np.column_stack(scores), axis=1)]
    assert m.predict(q).tolist() == expected.tolist()


def test_predict_before_fit_and_shape_mismatch():
    for model in (DecisionTree(), RandomForest(n_trees=2), KNN(), GaussianNB(), LogisticRegression(), LinearRegression()):
        with pytest.raises(NotFittedError):
            model.predict(np.ones((1, 2)))
    X, y = blobs(20)
    with pytest.raises(ValueError):
        DecisionTree().fit(X, y).predict(np.ones((2, 5)))


def test_family_target_checks():
    with pytest.raises(ValueError):
        fit(ModelSpec("decision_tree"), np.ones((3, 1)), [0.5, 0.1, 0.2])
    with pytest.raises(ValueError):
        fit(ModelSpec("linear_regression"), np.ones((3, 1)), ["a", "b", "c"])
    with pytest.raises(ValueError):
        ModelSpec("svr")


# ---------------------------------------------------------------- trees

def random_grid_data(seed, n=12, p=2, levels=4, k=2):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, levels, size=(n, p)).astype(float)
    y = rng.integers(0, k, size=n)
    return X, y


def test_depth_two_tree_matches_bruteforce_fixture():
    X, y = random_grid_data(123)
    tree = DecisionTree(max_depth=2).fit(X, y)
    ours = (tree.predict(X) == y).mean()
    assert ours == cart_oracle.training_accuracy(X.tolist(), y.tolist(), 2)


def test_root_split_matches_bruteforce():
    for seed in range(30):
        X, y = random_grid_data(seed, levels=6)
        if len(set(y.tolist())) < 2:
            continue
        cost, f, thr = cart_oracle.best_split(X.tolist(), y.tolist())
        tree = DecisionTree(max_depth=1).fit(X, y).tree_
        assert (tree.feature[0], tree.threshold[0]) == (f, thr)


def test_unlimited_tree_fits_conflict_free_data():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(80, 3))
    y = rng.integers(0, 3, 80)
    assert (DecisionTree().fit(X, y).predict(X) == y).all()


def test_regression_tree_leaf_means():
    X = np.array([[0.0], [1.0], [10.0], [11.0]])
    t = np.array([1.0, 3.0, 10.0, 12.0])
    m = DecisionTree(max_depth=1, task="regression").fit(X, t)
    np.testing.assert_allclose(m.predict([[0.5], [10.5]]), [2.0, 11.0])
    assert m.tree_.threshold[0] == 5.5


@pytest.mark.parametrize("seed", range(5))
def test_forest_degenerates_to_tree(seed):
    X, y = random_grid_data(seed, n=40, p=3, levels=5, k=3)
    probe = np.random.default_rng(seed + 100).uniform(-1, 6, size=(50, 3))
    tree = DecisionTree().fit(X, y)
    forest = RandomForest(n_trees=1, bootstrap=False, max_features="all", seed=seed).fit(X, y)
    np.testing.assert_array_equal(tree.predict(probe), forest.predict(probe))


def test_forest_is_thread_count_independent():
    X, y = blobs(80, seed=3)
    a = RandomForest(n_trees=12, seed=4).fit(X, y)
    b = RandomForest(n_trees=12, seed=4, n_jobs=4).fit(X, y)
    assert json.dumps(to_document(a)) == json.dumps(to_document(b))


def test_tree_models_invariant_to_affine_column_rescale():
    X, y = blobs(60, seed=9)
    scaled = X * np.array([3.0, 0.5, 100.0]) + np.array([-2.0, 7.0, 1e3])
    probe = np.random.default_rng(1).normal(size=(30, 3)) * 3
    probe_scaled = probe * np.array([3.0, 0.5, 100.0]) + np.array([-2.0, 7.0, 1e3])
    for make in (lambda: DecisionTree(), lambda: RandomForest(n_trees=10, seed=1)):
        a = make().fit(X, y).predict(probe)
        b = make().fit(scaled, y).predict(probe_scaled)
        np.testing.assert_array_equal(a, b)


def test_forest_vote_tie_goes_to_lower_class():
    X = np.array([[0.0], [1.0]])
    forest = RandomForest(n_trees=2, bootstrap=False, max_features="all").fit(X, ["a", "b"])
    # force one vote each way
    forest.trees_[1] = DecisionTree().fit(X, ["a", "b"]).tree_
    forest.trees_[1].value = forest.trees_[1].value[:, ::-1].copy()
    assert forest.predict([[0.0]]).tolist() == ["a"]


# ---------------------------------------------------------------- importances

def test_importance_concentrates_on_informative_feature():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(300, 4))
    y = (X[:, 0] > 0.1).astype(int)
    for model in (DecisionTree(), RandomForest(n_trees=30, seed=2, max_features="all")):
        imp = feature_importances(model.fit(X, y))
        assert imp[0] > 0.9
        assert abs(imp.sum() - 1) < 1e-9 and (imp >= 0).all()


def test_importance_on_noise_is_spread():
    for seed in range(10):
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(120, 5))
        y = rng.integers(0, 2, 120)
        imp = feature_importances(RandomForest(n_trees=20, seed=seed).fit(X, y))
        assert imp.max() < 0.6


def test_importance_edge_cases():
    m = DecisionTree().fit(np.ones((4, 3)), [0, 0, 0, 0])
    np.testing.assert_array_equal(feature_importances(m), np.full(3, 1 / 3))
    with pytest.raises(TypeError):
        feature_importances(KNN().fit(np.ones((5, 2)), [0, 1, 0, 1, 0]))


# ---------------------------------------------------------------- persistence

@pytest.mark.parametrize("family", [
    "decision_tree", "random_forest", "logistic_regression", "knn", "gaussian_nb",
    "linear_regression", "decision_tree_regressor", "random_forest_regressor",
])
def test_persistence_roundtrip(family, tmp_path):
    X, y = blobs(50, seed=7, k=3)
    spec = ModelSpec(family, {"n_trees": 7} if family.startswith("random_forest") else {})
    if not spec.is_classifier:
        y = X @ np.array([1.0, -2.0, 0.5]) + np.random.default_rng(0).normal(size=len(X))
    model = make_model(spec).fit(X, y)
    zs = zscore_fit(X)
    save_model(tmp_path / "m.json", model, zs, ["a", "b", "c"], meta={"task": "x"})
    back, scaler, doc = load_model(tmp_path / "m.json")
    probe = np.random.default_rng(1).normal(size=(40, 3)) * 4
    np.testing.assert_array_equal(model.predict(probe), back.predict(probe))
    np.testing.assert_array_equal(scaler.mean, zs.mean)
    assert doc["feature_names"] == ["a", "b", "c"] and doc["meta"] == {"task": "x"}


def test_persistence_rejects_foreign_documents():
    with pytest.raises(ModelFormatError):
        from_document({"format": "other"})
    doc = to_document(KNN().fit(np.ones((3, 1)), [0, 1, 0]))
    with pytest.raises(ModelFormatError):
        from_document({**doc, "version": 99})
    with pytest.raises(ModelFormatError):
        from_document({k: v for k, v in doc.items() if k != "state"})
