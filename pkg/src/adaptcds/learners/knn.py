"""K-nearest neighbors with mixed numeric/categorical (HEOM) distance."""

from __future__ import annotations

import math

from ..tabular import ABOVE
from .base import LearnerError, Model, ModelSpec


class KNNModel(Model):
    method = "KNN"

    def __init__(self, spec, columns, rows, labels, k):
        super().__init__(spec, columns)
        self.rows = rows
        self.labels = labels
        self.k = k

    def _distance(self, a, b) -> float:
        s = 0.0
        for col, va, vb in zip(self.columns, a, b):
            if col.kind == "numeric":
                s += (va - vb) ** 2
            elif va != vb:
                s += 1.0
        return math.sqrt(s)

    def _proba(self, row) -> float:
        # distance ties broken by training-row index (determinism)
        ranked = sorted(
            range(len(self.rows)), key=lambda i: (self._distance(self.rows[i], row), i)
        )
        votes = sum(1 for i in ranked[: self.k] if self.labels[i] == ABOVE)
        return votes / self.k

    def params_to_dict(self) -> dict:
        return {"rows": [list(r) for r in self.rows], "labels": list(self.labels), "k": self.k}

    @classmethod
    def params_from_dict(cls, spec, columns, doc):
        return cls(spec, columns, [list(r) for r in doc["rows"]], list(doc["labels"]), doc["k"])


def fit_knn(spec: ModelSpec, columns, rows, labels) -> KNNModel:
    k = int(spec.hyperparams.get("k", 5))
    if k > len(rows):
        raise LearnerError(f"k={k} exceeds training size {len(rows)}")
    return KNNModel(spec, columns, [list(r) for r in rows], list(labels), k)
