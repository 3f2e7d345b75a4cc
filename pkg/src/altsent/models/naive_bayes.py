from __future__ import annotations

import numpy as np

from .base import Model, NotFittedError, check_matrix


class GaussianNB(Model):
    """Gaussian naive Bayes.

    Every class variance is floored by ``var_smoothing`` times the largest
    per-feature variance of the training data.
    """

    family = "gaussian_nb"

    def __init__(self, var_smoothing=1e-9):
        self.var_smoothing = var_smoothing
        self.theta_ = None

    def params(self) -> dict:
        return {"var_smoothing": self.var_smoothing}

    def fit(self, X, y):
        X = check_matrix(X)
        y_enc, k = self._encode_targets(X, y)
        epsilon = self.var_smoothing * float(np.var(X, axis=0).max())
        if epsilon == 0.0:
            # all features constant; any positive floor keeps the densities finite
            epsilon = self.var_smoothing
        self.theta_ = np.array([X[y_enc == c].mean(axis=0) for c in range(k)])
        self.var_ = np.array([X[y_enc == c].var(axis=0) for c in range(k)]) + epsilon
        self.class_log_prior_ = np.log(np.bincount(y_enc, minlength=k) / len(y_enc))
        return self

    def predict(self, X):
        if self.theta_ is None:
            raise NotFittedError("fit the model before predicting")
        X = self._check_predict_matrix(X)
        joint = []
        for c in range(len(self.classes_)):
            ll = -0.5 * np.sum(np.log(2.0 * np.pi * self.var_[c]))
            ll = ll - 0.5 * np.sum((X - self.theta_[c]) ** 2 / self.var_[c], axis=1)
            joint.append(self.class_log_prior_[c] + ll)
        return self.classes_[np.argmax(np.column_stack(joint), axis=1)]
