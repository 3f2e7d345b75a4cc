"""Model families by name, default hyperparameter grids and fit/predict helpers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linear import LinearRegression, LogisticRegression
from .naive_bayes import GaussianNB
from .neighbors import KNN
from .tree import DecisionTree, RandomForest

CLASSIFIERS = ("decision_tree", "random_forest", "logistic_regression", "knn", "gaussian_nb")
REGRESSORS = ("linear_regression", "decision_tree_regressor", "random_forest_regressor")
FAMILIES = CLASSIFIERS + REGRESSORS

_TREE_GRID = {"max_depth": [4, 8, 16, None], "min_samples_split": [2, 10]}

DEFAULT_GRIDS: dict[str, dict[str, list]] = {
    "decision_tree": _TREE_GRID,
    "random_forest": _TREE_GRID,
    "decision_tree_regressor": _TREE_GRID,
    "random_forest_regressor": _TREE_GRID,
    "knn": {"k": [3, 5, 11]},
    "logistic_regression": {"C": [0.1, 1.0, 10.0]},
    "gaussian_nb": {"var_smoothing": [1e-9]},
    "linear_regression": {},
}


@dataclass
class ModelSpec:
    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown model family {self.family!r}; choose from {', '.join(FAMILIES)}")

    @property
    def is_classifier(self) -> bool:
        return self.family in CLASSIFIERS


def make_model(spec: ModelSpec, n_jobs: int = 1):
    p = dict(spec.params)
    f = spec.family
    if f == "decision_tree":
        return DecisionTree(task="classification", **p)
    if f == "decision_tree_regressor":
        return DecisionTree(task="regression", **p)
    if f == "random_forest":
        return RandomForest(task="classification", n_jobs=n_jobs, **p)
    if f == "random_forest_regressor":
        return RandomForest(task="regression", n_jobs=n_jobs, **p)
    if f == "logistic_regression":
        return LogisticRegression(**p)
    if f == "knn":
        return KNN(**p)
    if f == "gaussian_nb":
        return GaussianNB(**p)
    return LinearRegression(**p)


def fit(spec: ModelSpec, X, y, n_jobs: int = 1):
    y = np.asarray(y)
    if spec.is_classifier and y.dtype.kind == "f":
        raise ValueError(f"{spec.family} is a classifier; got real-valued targets")
    if not spec.is_classifier and y.dtype.kind not in "fiu":
        raise ValueError(f"{spec.family} is a regressor; got non-numeric targets")
    return make_model(spec, n_jobs).fit(X, y)


def predict(model, X):
    return model.predict(X)


def family_of(model) -> str:
    if isinstance(model, DecisionTree):
        return "decision_tree" if model.is_classifier else "decision_tree_regressor"
    if isinstance(model, RandomForest):
        return "random_forest" if model.is_classifier else "random_forest_regressor"
    return model.family
