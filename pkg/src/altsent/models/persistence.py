"""Versioned JSON documents for fitted models.

Trees are stored as nested nodes::

    {"feature": 0, "threshold": 0.25, "n_samples": 40, "impurity": 0.5,
     "left": {...}, "right": {...}}
    {"value": [12.0, 3.0], "n_samples": 15, "impurity": 0.32}   # leaf

Floats are written with ``repr`` precision, so a reloaded model predicts
exactly what the in-memory one did.
"""

from __future__ import annotations

import json

import numpy as np

from .base import Model
from .linear import LinearRegression, LogisticRegression
from .naive_bayes import GaussianNB
from .neighbors import KNN
from .preprocessing import ScalerParams
from .registry import ModelSpec, family_of, make_model
from .tree import DecisionTree, RandomForest, _TreeArrays

FORMAT = "altsent-model"
VERSION = 1


class ModelFormatError(ValueError):
    pass


def _floats(a) -> list:
    return np.asarray(a, dtype=float).tolist()


def _tree_to_nodes(tree: _TreeArrays, node: int = 0) -> dict:
    out = {"n_samples": int(tree.n_samples[node]), "impurity": float(tree.impurity[node])}
    if tree.feature[node] < 0:
        value = tree.value[node]
        out["value"] = _floats(value) if np.ndim(value) else float(value)
        return out
    out["feature"] = int(tree.feature[node])
    out["threshold"] = float(tree.threshold[node])
    out["left"] = _tree_to_nodes(tree, int(tree.left[node]))
    out["right"] = _tree_to_nodes(tree, int(tree.right[node]))
    return out


def _tree_from_nodes(doc: dict) -> _TreeArrays:
    tree = _TreeArrays()
    stack = [(doc, None, None)]
    while stack:
        nd, parent, is_left = stack.pop()
        if "value" in nd:
            node = tree.add(nd["value"], nd["n_samples"], nd["impurity"])
        else:
            node = tree.add(None, nd["n_samples"], nd["impurity"])
            tree.feature[node] = int(nd["feature"])
            tree.threshold[node] = float(nd["threshold"])
            stack.append((nd["right"], node, False))
            stack.append((nd["left"], node, True))
        if parent is not None:
            (tree.left if is_left else tree.right)[parent] = node
    # internal nodes carry no value; pad with the shape of a leaf value
    template = next(v for v in tree.value if v is not None)
    fill = [0.0] * len(template) if isinstance(template, list) else 0.0
    tree.value = [fill if v is None else v for v in tree.value]
    return tree.freeze()


def _state(model: Model) -> dict:
    if isinstance(model, DecisionTree):
        return {"tree": _tree_to_nodes(model.tree_), "feature_importances": _floats(model.feature_importances_)}
    if isinstance(model, RandomForest):
        return {
            "trees": [_tree_to_nodes(t) for t in model.trees_],
            "feature_importances": _floats(model.feature_importances_),
        }
    if isinstance(model, LogisticRegression):
        return {"coef": _floats(model.coef_), "intercept": _floats(model.intercept_)}
    if isinstance(model, LinearRegression):
        return {"coef": _floats(model.coef_), "intercept": float(model.intercept_)}
    if isinstance(model, KNN):
        return {"X": _floats(model._X), "y": model._y.tolist()}
    if isinstance(model, GaussianNB):
        return {
            "theta": _floats(model.theta_),
            "var": _floats(model.var_),
            "class_log_prior": _floats(model.class_log_prior_),
        }
    raise TypeError(f"cannot persist {type(model).__name__}")


def _restore(model: Model, state: dict) -> None:
    if isinstance(model, DecisionTree):
        model.tree_ = _tree_from_nodes(state["tree"])
        model.feature_importances_ = np.asarray(state["feature_importances"])
    elif isinstance(model, RandomForest):
        model.trees_ = [_tree_from_nodes(t) for t in state["trees"]]
        model.feature_importances_ = np.asarray(state["feature_importances"])
    elif isinstance(model, LogisticRegression):
        model.coef_ = np.asarray(state["coef"], dtype=float)
        model.intercept_ = np.asarray(state["intercept"], dtype=float)
    elif isinstance(model, LinearRegression):
        model.coef_ = np.asarray(state["coef"], dtype=float)
        model.intercept_ = float(state["intercept"])
    elif isinstance(model, KNN):
        model._X = np.asarray(state["X"], dtype=float)
        model._y = np.asarray(state["y"], dtype=np.int64)
    elif isinstance(model, GaussianNB):
        model.theta_ = np.asarray(state["theta"], dtype=float)
        model.var_ = np.asarray(state["var"], dtype=float)
        model.class_log_prior_ = np.asarray(state["class_log_prior"], dtype=float)


def to_document(model: Model, scaler: ScalerParams | None = None, feature_names=None, meta: dict | None = None) -> dict:
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "family": family_of(model),
        "params": model.params(),
        "n_features": model.n_features_in_,
        "feature_names": list(feature_names) if feature_names is not None else None,
        "classes": [str(c) for c in model.classes_] if model.is_classifier else None,
        "scaler": scaler.to_dict() if scaler is not None else None,
        "state": _state(model),
    }
    if meta:
        doc["meta"] = meta
    return doc


def from_document(doc: dict):
    """Rebuild ``(model, scaler, document)`` from :func:`to_document` output."""
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise ModelFormatError("not an altsent model document")
    if doc.get("version") != VERSION:
        raise ModelFormatError(f"unsupported model document version {doc.get('version')!r}")
    try:
        model = make_model(ModelSpec(doc["family"], doc["params"]))
        model.n_features_in_ = int(doc["n_features"])
        if doc["classes"] is not None:
            model.classes_ = np.asarray(doc["classes"])
        _restore(model, doc["state"])
    except (KeyError, TypeError) as exc:
        raise ModelFormatError(f"malformed model document: {exc}") from None
    scaler = ScalerParams.from_dict(doc["scaler"]) if doc.get("scaler") else None
    return model, scaler, doc


def save_model(path, model: Model, scaler: ScalerParams | None = None, feature_names=None, meta=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_document(model, scaler, feature_names, meta), fh, indent=1)
        fh.write("\n")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return from_document(json.load(fh))
