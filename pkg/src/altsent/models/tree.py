"""CART decision trees and random forests (classification and regression).

Splits are binary ``x[f] <= threshold`` tests with thresholds at midpoints
of consecutive distinct feature values. Classification minimises weighted
Gini impurity, regression weighted variance. Among equally good splits the
lowest feature index wins, then the lowest threshold.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .base import Model, NotFittedError, check_matrix

# relative slack when comparing split scores computed along different paths
_TIE_TOL = 1e-12


class _TreeArrays:
    """Flat node storage; ``feature == -1`` marks a leaf."""

    def __init__(self):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list = []
        self.n_samples: list[int] = []
        self.impurity: list[float] = []

    def add(self, value, n, impurity) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(value)
        self.n_samples.append(n)
        self.impurity.append(impurity)
        return len(self.feature) - 1

    def freeze(self) -> "_TreeArrays":
        self.feature = np.asarray(self.feature, dtype=np.int64)
        self.threshold = np.asarray(self.threshold, dtype=float)
        self.left = np.asarray(self.left, dtype=np.int64)
        self.right = np.asarray(self.right, dtype=np.int64)
        self.value = np.asarray(self.value, dtype=float)
        self.n_samples = np.asarray(self.n_samples, dtype=np.int64)
        self.impurity = np.asarray(self.impurity, dtype=float)
        return self

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row of ``X``."""
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        active = self.feature[node] >= 0
        while active.any():
            r = rows[active]
            nd = node[r]
            go_left = X[r, self.feature[nd]] <= self.threshold[nd]
            node[r] = np.where(go_left, self.left[nd], self.right[nd])
            active = self.feature[node] >= 0
        return node


def _n_split_features(max_features, n_features: int) -> int:
    if max_features in (None, "all"):
        return n_features
    if max_features == "sqrt":
        return max(1, int(math.sqrt(n_features)))
    if isinstance(max_features, int) and max_features >= 1:
        return min(n_features, max_features)
    raise ValueError(f"max_features must be 'sqrt', 'all' or a positive int, not {max_features!r}")


def _best_split_for_feature(xs, ys, n_classes, eye=None):
    """Best split position along one presorted feature.

    Returns ``(score, position)``, where larger scores are better and the
    left child takes sorted positions ``0..position``; ``(-inf, -1)`` when
    the feature is constant.
    """
    n = len(xs)
    valid = xs[:-1] < xs[1:]
    if not valid.any():
        return -math.inf, -1
    n_left = np.arange(1, n, dtype=float)
    n_right = n - n_left
    if n_classes:
        onehot = eye[ys]
        left = np.cumsum(onehot, axis=0)[:-1]
        right = left[-1] + onehot[-1] - left
        # minimising n_l*gini_l + n_r*gini_r == maximising this
        score = (left * left).sum(axis=1) / n_left + (right * right).sum(axis=1) / n_right
    else:
        csum = np.cumsum(ys)
        left = csum[:-1]
        right = csum[-1] - left
        score = left * left / n_left + right * right / n_right
    score = np.where(valid, score, -math.inf)
    top = score.max()
    pos = int(np.flatnonzero(score >= top - _TIE_TOL * max(1.0, abs(top)))[0])
    return float(score[pos]), pos


def _node_stats(y, n_classes):
    if n_classes:
        counts = np.bincount(y, minlength=n_classes).astype(float)
        p = counts / counts.sum()
        return counts, float(1.0 - (p * p).sum()), bool((counts > 0).sum() <= 1)
    mean = float(y.mean())
    return mean, float(np.mean((y - mean) ** 2)), bool(np.ptp(y) == 0)


def build_tree(X, y, n_classes, max_depth=None, min_samples_split=2, max_features=None, rng=None) -> _TreeArrays:
    """Grow one tree on ``X`` with encoded labels (or float targets) ``y``.

    ``n_classes`` is 0 for regression. With ``max_features`` below the
    feature count, each split considers a random feature subset drawn from
    ``rng``; if none of those features can split the node the remaining
    features are tried as well.
    """
    n, p = X.shape
    m = _n_split_features(max_features, p)
    tree = _TreeArrays()
    eye = np.eye(n_classes) if n_classes else None
    order = np.argsort(X, axis=0, kind="stable").T.copy()  # p x n, per-feature sorted sample ids
    stack = [(order, 0, None, None)]
    while stack:
        order, depth, parent, is_left = stack.pop()
        idx = order[0]
        value, impurity, pure = _node_stats(y[idx], n_classes)
        node = tree.add(value, len(idx), impurity)
        if parent is not None:
            (tree.left if is_left else tree.right)[parent] = node

        if pure or len(idx) < min_samples_split or (max_depth is not None and depth >= max_depth):
            continue

        if m < p:
            chosen = sorted(rng.choice(p, size=m, replace=False).tolist())
            groups = [chosen, [f for f in range(p) if f not in chosen]]
        else:
            groups = [range(p)]
        best = (-math.inf, -1, -1)
        for features in groups:
            for f in features:
                s = order[f]
                score, pos = _best_split_for_feature(X[s, f], y[s], n_classes, eye)
                if pos >= 0 and (best[2] < 0 or score > best[0] + _TIE_TOL * max(1.0, abs(best[0]))):
                    best = (score, f, pos)
            if best[2] >= 0:
                break
        if best[2] < 0:
            continue

        _, f, pos = best
        s = order[f]
        lo, hi = X[s[pos], f], X[s[pos + 1], f]
        threshold = (lo + hi) / 2.0
        if threshold >= hi:
            threshold = lo
        go_left = np.zeros(n, dtype=bool)
        go_left[s[: pos + 1]] = True
        n_left = pos + 1
        mask = go_left[order]
        left_order = order[mask].reshape(p, n_left)
        right_order = order[~mask].reshape(p, len(idx) - n_left)
        tree.feature[node] = f
        tree.threshold[node] = float(threshold)
        # right pushed first so the left subtree gets the lower node ids
        stack.append((right_order, depth + 1, node, False))
        stack.append((left_order, depth + 1, node, True))
    return tree.freeze()


def tree_importances(tree: _TreeArrays, n_features: int) -> np.ndarray:
    """Mean decrease in impurity per feature, normalised to sum 1."""
    imp = np.zeros(n_features)
    for node in np.flatnonzero(tree.feature >= 0):
        l, r = tree.left[node], tree.right[node]
        gain = (
            tree.n_samples[node] * tree.impurity[node]
            - tree.n_samples[l] * tree.impurity[l]
            - tree.n_samples[r] * tree.impurity[r]
        )
        imp[tree.feature[node]] += max(gain, 0.0)
    total = imp.sum()
    if total <= 0:
        return np.full(n_features, 1.0 / n_features)
    return imp / total


class _TreeModelMixin:
    def _check_params(self):
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be >= 1 or None")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")


class DecisionTree(_TreeModelMixin, Model):
    """CART tree; ``task`` is ``"classification"`` or ``"regression"``."""

    family = "decision_tree"

    def __init__(self, max_depth=None, min_samples_split=2, task="classification"):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.task = task
        self.tree_ = None

    @property
    def is_classifier(self) -> bool:
        return self.task == "classification"

    def params(self) -> dict:
        return {"max_depth": self.max_depth, "min_samples_split": self.min_samples_split}

    def fit(self, X, y):
        self._check_params()
        X = check_matrix(X)
        y_enc, n_classes = self._encode_targets(X, y)
        self.tree_ = build_tree(X, y_enc, n_classes, self.max_depth, self.min_samples_split)
        self.feature_importances_ = tree_importances(self.tree_, self.n_features_in_)
        return self

    def _leaf_values(self, X):
        if self.tree_ is None:
            raise NotFittedError("fit the tree before predicting")
        X = self._check_predict_matrix(X)
        return self.tree_.value[self.tree_.apply(X)]

    def predict(self, X):
        values = self._leaf_values(X)
        if self.is_classifier:
            return self.classes_[np.argmax(values, axis=1)]
        return values


class RandomForest(_TreeModelMixin, Model):
    """Bagged CART trees with per-split feature subsampling.

    Tree ``t`` draws its bootstrap sample and feature subsets from a
    generator seeded with ``(seed, t)``, so results do not depend on
    ``n_jobs``.
    """

    family = "random_forest"

    def __init__(
        self,
        n_trees=100,
        max_depth=None,
        min_samples_split=2,
        max_features="sqrt",
        bootstrap=True,
        seed=0,
        task="classification",
        n_jobs=1,
    ):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.seed = seed
        self.task = task
        self.n_jobs = n_jobs
        self.trees_ = None

    @property
    def is_classifier(self) -> bool:
        return self.task == "classification"

    def params(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "max_features": self.max_features,
            "bootstrap": self.bootstrap,
            "seed": self.seed,
        }

    def fit(self, X, y):
        self._check_params()
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        X = check_matrix(X)
        y_enc, n_classes = self._encode_targets(X, y)
        n = len(X)

        def grow(t):
            rng = np.random.default_rng(np.random.SeedSequence([self.seed, t]))
            rows = rng.integers(0, n, size=n) if self.bootstrap else np.arange(n)
            return build_tree(
                X[rows], y_enc[rows], n_classes, self.max_depth, self.min_samples_split, self.max_features, rng
            )

        if self.n_jobs > 1:
            with ThreadPoolExecutor(max_workers=self.n_jobs) as pool:
                self.trees_ = list(pool.map(grow, range(self.n_trees)))
        else:
            self.trees_ = [grow(t) for t in range(self.n_trees)]
        self.feature_importances_ = forest_importances(self.trees_, self.n_features_in_)
        return self

    def predict(self, X):
        if self.trees_ is None:
            raise NotFittedError("fit the forest before predicting")
        X = self._check_predict_matrix(X)
        if self.is_classifier:
            k = len(self.classes_)
            votes = np.zeros((len(X), k), dtype=np.int64)
            rows = np.arange(len(X))
            for tree in self.trees_:
                winner = np.argmax(tree.value[tree.apply(X)], axis=1)
                np.add.at(votes, (rows, winner), 1)
            return self.classes_[np.argmax(votes, axis=1)]
        total = np.zeros(len(X))
        for tree in self.trees_:
            total += tree.value[tree.apply(X)]
        return total / len(self.trees_)


def forest_importances(trees, n_features: int) -> np.ndarray:
    imp = np.mean([tree_importances(t, n_features) for t in trees], axis=0)
    return imp / imp.sum()


def feature_importances(model) -> np.ndarray:
    """Normalised mean-decrease-in-impurity importances of a fitted tree model."""
    if not isinstance(model, (DecisionTree, RandomForest)):
        raise TypeError(f"feature importances need a tree model, not {type(model).__name__}")
    if getattr(model, "feature_importances_", None) is None:
        raise NotFittedError("model is not fitted")
    return model.feature_importances_
