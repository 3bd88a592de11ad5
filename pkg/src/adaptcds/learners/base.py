"""Shared fit/predict-probability contract for the classifier grid."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..tabular import ABOVE, BELOW, Column, check_row, fingerprint


class LearnerError(Exception):
    pass


@dataclass(frozen=True)
class ClassDistribution:
    p_below: float
    p_above: float

    def __post_init__(self):
        if self.p_below < -1e-9 or self.p_above < -1e-9:
            raise LearnerError("negative probability")
        if abs(self.p_below + self.p_above - 1.0) > 1e-9:
            raise LearnerError("distribution does not sum to 1")

    @property
    def argmax(self) -> str:
        return ABOVE if self.p_above >= self.p_below else BELOW


def distribution(p_above: float) -> ClassDistribution:
    p = min(max(float(p_above), 0.0), 1.0)
    return ClassDistribution(1.0 - p, p)


@dataclass(frozen=True)
class ModelSpec:
    method: str
    hyperparams: dict = field(default_factory=dict)

    @property
    def requires_discrete(self) -> bool:
        return self.method in ("AODE", "BayesNetK2")


class Model:
    """Fitted classifier. Subclasses implement _proba(row) -> p_above."""

    method = "?"

    def __init__(self, spec: ModelSpec, columns: tuple[Column, ...]):
        self.spec = spec
        self.columns = tuple(columns)
        self.fingerprint = fingerprint(self.columns)

    def predict_proba(self, row) -> ClassDistribution:
        check_row(self.columns, row)
        return distribution(self._proba(row))

    def _proba(self, row) -> float:
        raise NotImplementedError

    def params_to_dict(self) -> dict:
        raise NotImplementedError


def require_discrete(columns) -> None:
    numeric = [c.name for c in columns if c.kind == "numeric"]
    if numeric:
        raise LearnerError(f"discrete-only learner given numeric columns {numeric}")


def labels_to_y(labels) -> np.ndarray:
    bad = set(labels) - {ABOVE, BELOW}
    if bad:
        raise LearnerError(f"unknown class labels {bad}")
    return np.array([1.0 if l == ABOVE else 0.0 for l in labels])


class RowEncoder:
    """One-hot expansion: numerics pass through, categoricals become indicators."""

    def __init__(self, columns):
        self.columns = tuple(columns)
        self.n_dims = sum(
            1 if c.kind == "numeric" else len(c.categories) for c in self.columns
        )

    def encode(self, row) -> np.ndarray:
        out = np.zeros(self.n_dims)
        pos = 0
        for col, v in zip(self.columns, row):
            if col.kind == "numeric":
                out[pos] = v
                pos += 1
            else:
                out[pos + col.categories.index(v)] = 1.0
                pos += len(col.categories)
        return out

    def encode_all(self, rows) -> np.ndarray:
        return np.array([self.encode(r) for r in rows]) if rows else np.zeros((0, self.n_dims))
