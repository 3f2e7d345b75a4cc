from __future__ import annotations

import numpy as np


class NotFittedError(RuntimeError):
    """Raised when predicting with a model that has not been fitted."""


def check_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D feature matrix, got shape {X.shape}")
    if X.shape[0] == 0:
        raise ValueError("feature matrix has no rows")
    if not np.isfinite(X).all():
        raise ValueError("feature matrix contains NaN or infinite values")
    return X


class Model:
    """Shared plumbing: target encoding and input checks."""

    family = "model"
    is_classifier = True
    classes_: np.ndarray | None = None
    n_features_in_: int | None = None

    def params(self) -> dict:
        return {}

    def _encode_targets(self, X, y):
        y = np.asarray(y)
        if len(y) != len(X):
            raise ValueError(f"{len(X)} rows but {len(y)} targets")
        self.n_features_in_ = X.shape[1]
        if not self.is_classifier:
            y = y.astype(float)
            if not np.isfinite(y).all():
                raise ValueError("regression targets must be finite")
            return y, 0
        self.classes_, encoded = np.unique(y, return_inverse=True)
        return encoded.astype(np.int64), len(self.classes_)

    def _check_predict_matrix(self, X) -> np.ndarray:
        if self.n_features_in_ is None:
            raise NotFittedError(f"{type(self).__name__} is not fitted")
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got shape {X.shape}")
        return X

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"
