from __future__ import annotations

import numpy as np

from .base import Model, NotFittedError, check_matrix


class KNN(Model):
    """k-nearest-neighbour classifier (Euclidean).

    Equal distances go to the lower training row; a tied vote goes to the
    class that sorts first.
    """

    family = "knn"

    def __init__(self, k=5):
        self.k = k
        self._X = None

    def params(self) -> dict:
        return {"k": self.k}

    def fit(self, X, y):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        X = check_matrix(X)
        self._y, _ = self._encode_targets(X, y)
        self._X = X
        return self

    def predict(self, X):
        if self._X is None:
            raise NotFittedError("fit the model before predicting")
        X = self._check_predict_matrix(X)
        k = min(self.k, len(self._X))
        n_classes = len(self.classes_)
        out = np.empty(len(X), dtype=np.int64)
        for start in range(0, len(X), 512):
            chunk = X[start:start + 512]
            diff = chunk[:, None, :] - self._X[None, :, :]
            dist = (diff * diff).sum(axis=2)
            nearest = np.argsort(dist, axis=1, kind="stable")[:, :k]
            labels = self._y[nearest]
            votes = np.zeros((len(chunk), n_classes), dtype=np.int64)
            np.add.at(votes, (np.repeat(np.arange(len(chunk)), k), labels.ravel()), 1)
            out[start:start + len(chunk)] = np.argmax(votes, axis=1)
        return self.classes_[out]
