"""Logistic regression and least-squares classification on one-hot rows."""

from __future__ import annotations

import numpy as np

from .base import LearnerError, Model, ModelSpec, RowEncoder, labels_to_y


def _sigmoid(z):
    # piecewise so neither exp overflows
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _log1pexp(z):
    out = np.empty_like(z)
    pos = z > 0
    out[pos] = z[pos] + np.log1p(np.exp(-z[pos]))
    out[~pos] = np.log1p(np.exp(z[~pos]))
    return out


def logreg_objective(X, y, beta, ridge):
    """Penalized negative log-likelihood and its gradient (intercept first, unpenalized)."""
    z = X @ beta
    p = _sigmoid(z)
    log1pexp = _log1pexp(z)
    nll = float(np.sum(log1pexp - y * z))
    pen_mask = np.ones_like(beta)
    pen_mask[0] = 0.0
    nll += 0.5 * ridge * float(np.sum((pen_mask * beta) ** 2))
    grad = X.T @ (p - y) + ridge * pen_mask * beta
    return nll, grad


class LogRegModel(Model):
    method = "LogReg"

    def __init__(self, spec, columns, beta, converged):
        super().__init__(spec, columns)
        self.beta = np.asarray(beta, dtype=float)
        self.converged = converged
        self._encoder = RowEncoder(columns)

    def _proba(self, row) -> float:
        x = np.concatenate(([1.0], self._encoder.encode(row)))
        z = float(x @ self.beta)
        return 1.0 / (1.0 + np.exp(-z)) if z >= 0 else np.exp(z) / (1.0 + np.exp(z))

    def params_to_dict(self) -> dict:
        return {"beta": self.beta.tolist(), "converged": self.converged}

    @classmethod
    def params_from_dict(cls, spec, columns, doc):
        return cls(spec, columns, doc["beta"], doc["converged"])


def fit_logreg(spec: ModelSpec, columns, rows, labels) -> LogRegModel:
    ridge = float(spec.hyperparams.get("ridge", 1e-8))
    tol = float(spec.hyperparams.get("tol", 1e-8))
    max_iter = int(spec.hyperparams.get("max_iter", 200))
    if not rows:
        raise LearnerError("no training rows")
    enc = RowEncoder(columns)
    X = np.column_stack([np.ones(len(rows)), enc.encode_all(rows)])
    y = labels_to_y(labels)
    beta = np.zeros(X.shape[1])
    pen_mask = np.ones_like(beta)
    pen_mask[0] = 0.0
    converged = False
    for _ in range(max_iter):
        z = X @ beta
        p = _sigmoid(z)
        grad = X.T @ (p - y) + ridge * pen_mask * beta
        if np.max(np.abs(grad)) <= tol:
            converged = True
            break
        w = np.maximum(p * (1.0 - p), 1e-12)
        hess = (X.T * w) @ X + np.diag(ridge * pen_mask + 1e-12)
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(hess, grad, rcond=None)[0]
        # halving line search keeps Newton stable on separable data
        nll0, _ = logreg_objective(X, y, beta, ridge)
        scale = 1.0
        for _ in range(30):
            trial = beta - scale * step
            nll1, _ = logreg_objective(X, y, trial, ridge)
            if nll1 <= nll0:
                beta = trial
                break
            scale /= 2.0
        else:
            break
    return LogRegModel(spec, columns, beta, converged)


class LinRegClassifierModel(Model):
    """Least squares on the 0/1 class indicator; score clipped to [0,1]."""

    method = "LinRegClassifier"

    def __init__(self, spec, columns, beta):
        super().__init__(spec, columns)
        self.beta = np.asarray(beta, dtype=float)
        self._encoder = RowEncoder(columns)

    def _proba(self, row) -> float:
        x = np.concatenate(([1.0], self._encoder.encode(row)))
        return float(np.clip(x @ self.beta, 0.0, 1.0))

    def params_to_dict(self) -> dict:
        return {"beta": self.beta.tolist()}

    @classmethod
    def params_from_dict(cls, spec, columns, doc):
        return cls(spec, columns, doc["beta"])


def fit_linreg_classifier(spec: ModelSpec, columns, rows, labels) -> LinRegClassifierModel:
    ridge = float(spec.hyperparams.get("ridge", 1e-8))
    if not rows:
        raise LearnerError("no training rows")
    enc = RowEncoder(columns)
    X = np.column_stack([np.ones(len(rows)), enc.encode_all(rows)])
    y = labels_to_y(labels)
    pen = ridge * np.eye(X.shape[1])
    pen[0, 0] = 0.0
    try:
        beta = np.linalg.solve(X.T @ X + pen, X.T @ y)
    except np.linalg.LinAlgError:
        beta = np.linalg.lstsq(X.T @ X + pen, X.T @ y, rcond=None)[0]
    return LinRegClassifierModel(spec, columns, beta)
