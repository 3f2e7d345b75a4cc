"""Preprocessing, model selection and the classifier/regressor families."""

from .base import NotFittedError
from .linear import LinearRegression, LogisticRegression
from .naive_bayes import GaussianNB
from .neighbors import KNN
from .persistence import ModelFormatError, from_document, load_model, save_model, to_document
from .preprocessing import ScalerParams, zscore_apply, zscore_fit
from .registry import CLASSIFIERS, DEFAULT_GRIDS, FAMILIES, REGRESSORS, ModelSpec, fit, make_model, predict
from .selection import (
    GridSearchResult,
    SplitSpec,
    expand_grid,
    grid_search,
    kfold,
    split_train_test,
    stratified_kfold,
    train_test_indices,
)
from .tree import DecisionTree, RandomForest, feature_importances

__all__ = [
    "CLASSIFIERS", "DEFAULT_GRIDS", "FAMILIES", "REGRESSORS",
    "DecisionTree", "GaussianNB", "GridSearchResult", "KNN", "LinearRegression",
    "LogisticRegression", "ModelFormatError", "ModelSpec", "NotFittedError",
    "RandomForest", "ScalerParams", "SplitSpec",
    "expand_grid", "feature_importances", "fit", "from_document", "grid_search",
    "kfold", "load_model", "make_model", "predict", "save_model",
    "split_train_test", "stratified_kfold", "to_document", "train_test_indices",
    "zscore_apply", "zscore_fit",
]
