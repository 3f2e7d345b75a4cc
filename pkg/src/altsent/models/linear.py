from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

from .base import Model, NotFittedError, check_matrix


def _log_loss_and_grad(params, X, t, alpha):
    """L2-penalised logistic loss for targets ``t`` in {0, 1}; intercept is last and unpenalised."""
    w, b = params[:-1], params[-1]
    z = X @ w + b
    # log(1 + exp(z)) - t*z, computed stably
    loss = np.sum(np.logaddexp(0.0, z) - t * z) + 0.5 * alpha * (w @ w)
    p = np.exp(-np.logaddexp(0.0, -z))
    r = p - t
    grad = np.empty_like(params)
    grad[:-1] = X.T @ r + alpha * w
    grad[-1] = r.sum()
    return loss, grad


class LogisticRegression(Model):
    """L2-regularised logistic regression fitted with L-BFGS.

    ``C`` is the inverse regularisation strength (penalty ``||w||^2 / 2C``).
    More than two classes are handled one-vs-rest.
    """

    family = "logistic_regression"

    def __init__(self, C=1.0, tol=1e-6, max_iter=1000):
        self.C = C
        self.tol = tol
        self.max_iter = max_iter
        self.coef_ = None
        self.intercept_ = None

    def params(self) -> dict:
        return {"C": self.C, "tol": self.tol, "max_iter": self.max_iter}

    def _fit_binary(self, X, t):
        res = minimize(
            _log_loss_and_grad,
            np.zeros(X.shape[1] + 1),
            args=(X, t, 1.0 / self.C),
            jac=True,
            method="L-BFGS-B",
            options={"gtol": self.tol, "maxiter": self.max_iter},
        )
        return res.x[:-1], res.x[-1]

    def fit(self, X, y):
        if self.C <= 0:
            raise ValueError("C must be > 0")
        X = check_matrix(X)
        y_enc, k = self._encode_targets(X, y)
        if k == 1:
            self.coef_ = np.zeros((1, X.shape[1]))
            self.intercept_ = np.zeros(1)
        elif k == 2:
            w, b = self._fit_binary(X, (y_enc == 1).astype(float))
            self.coef_, self.intercept_ = w[None, :], np.array([b])
        else:
            fits = [self._fit_binary(X, (y_enc == c).astype(float)) for c in range(k)]
            self.coef_ = np.array([w for w, _ in fits])
            self.intercept_ = np.array([b for _, b in fits])
        return self

    def decision_function(self, X):
        if self.coef_ is None:
            raise NotFittedError("fit the model before predicting")
        X = self._check_predict_matrix(X)
        return X @ self.coef_.T + self.intercept_

    def predict(self, X):
        scores = self.decision_function(X)
        if len(self.classes_) == 1:
            return np.repeat(self.classes_, len(scores))
        if len(self.classes_) == 2:
            return self.classes_[(scores[:, 0] > 0).astype(int)]
        return self.classes_[np.argmax(scores, axis=1)]


class LinearRegression(Model):
    """Ordinary least squares via the normal equations.

    A singular system is retried with a ridge term of ``1e-10`` on the
    diagonal.
    """

    family = "linear_regression"
    is_classifier = False
    ridge_fallback = 1e-10

    def __init__(self):
        self.coef_ = None
        self.intercept_ = None

    def fit(self, X, y):
        X = check_matrix(X)
        y, _ = self._encode_targets(X, y)
        A = np.column_stack([X, np.ones(len(X))])
        gram = A.T @ A
        rhs = A.T @ y
        if np.linalg.matrix_rank(gram) < gram.shape[0]:
            gram = gram + self.ridge_fallback * np.eye(gram.shape[0])
        beta = np.linalg.solve(gram, rhs)
        self.coef_, self.intercept_ = beta[:-1], float(beta[-1])
        return self

    def predict(self, X):
        if self.coef_ is None:
            raise NotFittedError("fit the model before predicting")
        X = self._check_predict_matrix(X)
        return X @ self.coef_ + self.intercept_
