"""Synthetic minority oversampling (SMOTE)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SmoteConfig:
    k_neighbors: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be >= 1")


@dataclass
class SmoteResult:
    X: np.ndarray
    y: np.ndarray
    # per synthetic row: (source row, neighbour row) in the input matrix
    pairs: np.ndarray


def _class_seed(seed: int, class_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, class_index]))


def nearest_neighbors(points: np.ndarray, k: int) -> np.ndarray:
    """Indices of the ``k`` nearest other points for each point.

    Euclidean distance; equal distances go to the lower row index.
    """
    n = len(points)
    out = np.empty((n, k), dtype=int)
    for start in range(0, n, 256):
        stop = min(n, start + 256)
        diff = points[start:stop, None, :] - points[None, :, :]
        dist = np.sqrt((diff * diff).sum(axis=2))
        dist[np.arange(stop - start), np.arange(start, stop)] = np.inf
        out[start:stop] = np.argsort(dist, axis=1, kind="stable")[:, :k]
    return out


def smote_with_provenance(X, y, config: SmoteConfig = SmoteConfig()) -> SmoteResult:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("SMOTE needs a non-empty 2-D matrix")
    if len(y) != X.shape[0]:
        raise ValueError("labels and matrix rows differ in length")

    classes, counts = np.unique(y, return_counts=True)
    target = counts.max()
    new_rows, new_labels, pairs = [], [], []
    for ci, (cls, count) in enumerate(zip(classes, counts)):
        need = int(target - count)
        if need == 0:
            continue
        members = np.flatnonzero(y == cls)
        rng = _class_seed(config.seed, ci)
        if count == 1:
            base = np.repeat(members, need)
            new_rows.append(X[base])
            pairs.append(np.column_stack([base, base]))
        else:
            k = min(config.k_neighbors, int(count) - 1)
            nn = nearest_neighbors(X[members], k)
            src = rng.integers(0, count, size=need)
            pick = rng.integers(0, k, size=need)
            gap = rng.random(size=(need, 1))
            a = X[members[src]]
            b = X[members[nn[src, pick]]]
            synth = a + gap * (b - a)
            # rounding must not leave the segment
            synth = np.clip(synth, np.minimum(a, b), np.maximum(a, b))
            new_rows.append(synth)
            pairs.append(np.column_stack([members[src], members[nn[src, pick]]]))
        new_labels.append(np.full(need, cls, dtype=y.dtype))

    if not new_rows:
        return SmoteResult(X.copy(), y.copy(), np.empty((0, 2), dtype=int))
    return SmoteResult(
        np.vstack([X] + new_rows),
        np.concatenate([y] + new_labels),
        np.vstack(pairs).astype(int),
    )


def smote(X, y, config: SmoteConfig = SmoteConfig()) -> tuple[np.ndarray, np.ndarray]:
    """Oversample every class up to the majority count.

    Original rows come first and unchanged. Each synthetic row is
    ``x + u * (x_nn - x)`` with ``u ~ U[0, 1)``, ``x`` a random member of
    the class and ``x_nn`` one of its ``k`` nearest same-class neighbours.
    ``k`` is clamped to class size - 1; a singleton class is duplicated.
    """
    res = smote_with_provenance(X, y, config)
    return res.X, res.y
