"""Single-hidden-layer perceptron: sigmoid hidden units, softmax output,
full-batch backprop with momentum and optional per-epoch learning-rate decay."""

from __future__ import annotations

import math

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


def _softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def mlp_loss_and_grads(X, y, W1, b1, W2, b2):
    """Total cross-entropy and gradients; used by training and the gradient check."""
    a1 = _sigmoid(X @ W1 + b1)
    probs = _softmax(a1 @ W2 + b2)
    targets = np.column_stack([1.0 - y, y])  # class order (below, above)
    loss = -float(np.sum(targets * np.log(np.maximum(probs, 1e-300))))
    d2 = probs - targets
    gW2 = a1.T @ d2
    gb2 = d2.sum(axis=0)
    d1 = (d2 @ W2.T) * a1 * (1.0 - a1)
    gW1 = X.T @ d1
    gb1 = d1.sum(axis=0)
    return loss, (gW1, gb1, gW2, gb2)


class MLPModel(Model):
    method = "MLP"

    def __init__(self, spec, columns, W1, b1, W2, b2):
        super().__init__(spec, columns)
        self.W1 = np.asarray(W1, dtype=float)
        self.b1 = np.asarray(b1, dtype=float)
        self.W2 = np.asarray(W2, dtype=float)
        self.b2 = np.asarray(b2, dtype=float)
        self._encoder = RowEncoder(columns)

    def _proba(self, row) -> float:
        x = self._encoder.encode(row)[None, :]
        a1 = _sigmoid(x @ self.W1 + self.b1)
        probs = _softmax(a1 @ self.W2 + self.b2)
        return float(probs[0, 1])

    def params_to_dict(self) -> dict:
        return {
            "W1": self.W1.tolist(),
            "b1": self.b1.tolist(),
            "W2": self.W2.tolist(),
            "b2": self.b2.tolist(),
        }

    @classmethod
    def params_from_dict(cls, spec, columns, doc):
        return cls(spec, columns, doc["W1"], doc["b1"], doc["W2"], doc["b2"])


def fit_mlp(spec: ModelSpec, columns, rows, labels) -> MLPModel:
    if not rows:
        raise LearnerError("no training rows")
    lr0 = float(spec.hyperparams.get("learning_rate", 0.3))
    momentum = float(spec.hyperparams.get("momentum", 0.2))
    epochs = int(spec.hyperparams.get("epochs", 500))
    decay = bool(spec.hyperparams.get("decay", True))
    seed = spec.hyperparams.get("seed", 0)

    enc = RowEncoder(columns)
    X = enc.encode_all(rows)
    y = labels_to_y(labels)
    p = X.shape[1]
    hidden = int(spec.hyperparams.get("hidden", math.ceil((p + 2) / 2)))

    rng = np.random.default_rng(seed)
    W1 = rng.uniform(-0.5, 0.5, size=(p, hidden))
    b1 = rng.uniform(-0.5, 0.5, size=hidden)
    W2 = rng.uniform(-0.5, 0.5, size=(hidden, 2))
    b2 = rng.uniform(-0.5, 0.5, size=2)
    vel = [np.zeros_like(a) for a in (W1, b1, W2, b2)]

    for epoch in range(1, epochs + 1):
        lr = lr0 / epoch if decay else lr0
        _, grads = mlp_loss_and_grads(X, y, W1, b1, W2, b2)
        params = [W1, b1, W2, b2]
        for i in range(4):
            vel[i] = momentum * vel[i] - lr * grads[i]
            params[i] = params[i] + vel[i]
        W1, b1, W2, b2 = params
    return MLPModel(spec, columns, W1, b1, W2, b2)
