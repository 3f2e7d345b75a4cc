"""Train/test splitting, stratified k-fold and exhaustive grid search."""

from __future__ import annotations

import itertools
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..evaluation import r_squared


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie strictly between 0 and 1")


def _n_train(n: int, train_fraction: float) -> int:
    n_test = math.ceil(n * (1.0 - train_fraction) - 1e-9)
    return n - n_test


def train_test_indices(labels: Sequence, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    """Sorted train and test row indices.

    The test part holds ``ceil(n * (1 - train_fraction))`` rows. In
    stratified mode the train rows are apportioned to classes by largest
    remainder, so each class keeps its proportion within one sample.
    """
    y = np.asarray(labels)
    n = len(y)
    n_train = _n_train(n, spec.train_fraction)
    rng = np.random.default_rng(spec.seed)
    if not spec.stratified:
        perm = rng.permutation(n)
        return np.sort(perm[:n_train]), np.sort(perm[n_train:])

    classes, counts = np.unique(y, return_counts=True)
    for cls, count in zip(classes, counts):
        if count < 2:
            raise ValueError(f"class {cls!r} has {count} sample(s); stratified splitting needs at least 2")
    raw = n_train * counts / n
    take = np.floor(raw).astype(int)
    order = np.argsort(-(raw - take), kind="stable")
    for i in order[: n_train - take.sum()]:
        take[i] += 1
    take = np.clip(take, 1, counts - 1)

    train, test = [], []
    for cls, t in zip(classes, take):
        members = rng.permutation(np.flatnonzero(y == cls))
        train.append(members[:t])
        test.append(members[t:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def split_train_test(X, y, spec: SplitSpec = SplitSpec()):
    """Return ``((X_train, y_train), (X_test, y_test))``."""
    X = np.asarray(X)
    y = np.asarray(y)
    tr, te = train_test_indices(y, spec)
    return (X[tr], y[tr]), (X[te], y[te])


def stratified_kfold(labels: Sequence, k: int = 10, seed: int = 0) -> list[np.ndarray]:
    """Partition row indices into ``k`` class-balanced folds.

    Each class is shuffled and dealt round-robin into the folds, continuing
    where the previous class stopped, so fold sizes differ by at most one
    and every fold holds each class in proportion (within one sample).
    """
    y = np.asarray(labels)
    n = len(y)
    if k < 2 or k > n:
        raise ValueError(f"k must lie in [2, {n}], got {k}")
    classes, counts = np.unique(y, return_counts=True)
    if counts.min() < k:
        warnings.warn(
            f"smallest class has {counts.min()} members, fewer than k={k}; some folds will miss it",
            stacklevel=2,
        )
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    cursor = 0
    for cls in classes:
        for idx in rng.permutation(np.flatnonzero(y == cls)):
            folds[cursor % k].append(int(idx))
            cursor += 1
    return [np.array(sorted(f), dtype=np.int64) for f in folds]


def kfold(n: int, k: int = 10, seed: int = 0) -> list[np.ndarray]:
    """Shuffled plain k-fold partition (used for regression targets)."""
    if k < 2 or k > n:
        raise ValueError(f"k must lie in [2, {n}], got {k}")
    perm = np.random.default_rng(seed).permutation(n)
    return [np.sort(perm[i::k]) for i in range(k)]


def expand_grid(grid: dict[str, Sequence]) -> list[dict]:
    """All parameter combinations, in key order with the last key varying fastest."""
    if not grid:
        raise ValueError("parameter grid is empty")
    keys = list(grid)
    values = [list(grid[key]) for key in keys]
    if any(len(v) == 0 for v in values):
        raise ValueError("parameter grid has a key with no values")
    return [dict(zip(keys, combo)) for combo in itertools.product(*values)]


def accuracy_score(y_true, y_pred) -> float:
    y_true = np.asarray(y_true)
    return float(np.mean(y_true == np.asarray(y_pred))) if len(y_true) else 0.0


SCORERS: dict[str, Callable] = {
    "accuracy": accuracy_score,
    "r2": r_squared,
}


@dataclass
class GridSearchResult:
    best_params: dict
    best_score: float
    table: list[dict] = field(default_factory=list)


def grid_search(
    make_model: Callable[[dict], object],
    grid: dict[str, Sequence],
    X,
    y,
    folds: Sequence[np.ndarray],
    scoring: str = "accuracy",
    resample: Callable | None = None,
    workers: int = 1,
) -> GridSearchResult:
    """Cross-validate every grid point and keep the best mean score.

    ``make_model(params)`` builds an unfitted model. ``resample(X, y, fold)``
    may rebalance each training part (e.g. SMOTE) before fitting. Ties go
    to the earliest grid point.
    """
    points = expand_grid(grid)
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    score_fn = SCORERS[scoring]
    all_idx = np.arange(len(y))

    def run(task):
        p, f = task
        held = folds[f]
        train = np.setdiff1d(all_idx, held, assume_unique=True)
        X_tr, y_tr = X[train], y[train]
        if resample is not None:
            X_tr, y_tr = resample(X_tr, y_tr, f)
        model = make_model(points[p]).fit(X_tr, y_tr)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return float(score_fn(y[held], model.predict(X[held])))

    tasks = [(p, f) for p in range(len(points)) for f in range(len(folds))]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scores = list(pool.map(run, tasks))
    else:
        scores = [run(t) for t in tasks]

    table = []
    best_i, best_score = 0, -math.inf
    for p, params in enumerate(points):
        fold_scores = scores[p * len(folds):(p + 1) * len(folds)]
        mean = math.fsum(fold_scores) / len(fold_scores)
        table.append({"params": params, "fold_scores": fold_scores, "mean_score": mean})
        if mean > best_score:
            best_i, best_score = p, mean
    return GridSearchResult(points[best_i], best_score, table)
